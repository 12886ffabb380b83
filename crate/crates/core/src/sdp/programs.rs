//! Decomposable-witness programs: spectrum feasibility checks, the primal
//! minimum-pairing program, witness decomposition, and the maximum-overlap
//! construction of witnesses with many negative eigenvalues.

use serde::{Deserialize, Serialize};

use super::problem::{
    conic_solve_with, BlockKind, BlockValue, ConicProblem, ConicResult, ConicStatus, FarkasCertificate,
    SolverSettings, Term,
};
use super::InteriorPoint;
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigenvalues, psd_check_hermitian, real_sym_min_eig, CMatrix, MaxAbs, RMatrix, C64,
};
use crate::matricize::{p_down, p_up, sym_mat_unchecked, Assignment};
use crate::symspace::{
    self, compress_unchecked, partial_transpose, projector_sym, sym_dim, sym_isometry, FullOperator, SymOperator,
};
use crate::witness::{count_negative_eigs, npt_subspace, Provenance, WitnessCandidate};

fn check_witness_spectrum(mu: &[f64], n: usize) -> Result<()> {
    if mu.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: mu.len() });
    }
    if mu.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite eigenvalue".into()));
    }
    if mu.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::Unsorted);
    }
    Ok(())
}

fn check_assignments(d: usize, assignments: &[Assignment]) -> Result<()> {
    if assignments.is_empty() {
        return Err(Error::InvalidArgument("empty assignment set".into()));
    }
    match assignments.iter().find(|a| a.d() != d) {
        Some(a) => Err(Error::DimensionMismatch { expected: d, got: a.d() }),
        None => Ok(()),
    }
}

fn real_block(b: &BlockValue) -> RMatrix {
    b.value.map(|z| z.re)
}

/// Terms for `Re Tr(M X_block)` with `M` Hermitian.
fn hermitian_inner_terms(block: usize, m: &CMatrix, scale: f64, out: &mut Vec<Term>) {
    let n = m.nrows();
    for p in 0..n {
        if m[(p, p)].re != 0.0 {
            out.push(Term::re(block, p, p, scale * m[(p, p)].re));
        }
        for q in p + 1..n {
            let z = m[(p, q)];
            if z.re != 0.0 {
                out.push(Term::re(block, p, q, 2.0 * scale * z.re));
            }
            if z.im != 0.0 {
                out.push(Term::im(block, p, q, 2.0 * scale * z.im));
            }
        }
    }
}

/// Feasible answer of a spectrum check: PSD `Y_k` and the entrywise slack
/// `p↓(μ) - Σ_k p↑(L_k*(Y_k))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualCertificate {
    pub y: Vec<RMatrix>,
    pub slack: Vec<f64>,
}

impl DualCertificate {
    /// Recomputes the slack from `Y_k` alone (no solver involved).
    pub fn recompute_slack(mu: &[f64], assignments: &[Assignment], y: &[RMatrix]) -> Vec<f64> {
        let n = mu.len();
        let mut lhs = vec![0.0; n];
        for (a, yk) in assignments.iter().zip(y) {
            let pairs = a.pair_of_target();
            let adj: Vec<f64> = pairs.iter().map(|&(i, j)| yk[(i, j)]).collect();
            lhs.iter_mut().zip(p_up(&adj)).for_each(|(l, v)| *l += v);
        }
        p_down(mu).iter().zip(&lhs).map(|(r, l)| r - l).collect()
    }

    /// All `Y_k` PSD and all slack entries `>= -tol`.
    pub fn verify(&self, mu: &[f64], assignments: &[Assignment], tol: f64) -> bool {
        let psd = self.y.iter().all(|y| {
            let (min, _) = real_sym_min_eig(&((y + y.transpose()) * 0.5));
            min >= -tol * y.max_abs().max(1.0)
        });
        let slack = Self::recompute_slack(mu, assignments, &self.y);
        psd && slack.iter().all(|&s| s >= -tol)
    }
}

/// A state spectrum on which the witness pairing is negative, certifying
/// that no decomposable witness has spectrum `μ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimalWitness {
    /// Descending, sums to one; every `L_k(λ)` is PSD.
    pub lambda: Vec<f64>,
    /// `Σ_j λ_{n-j+1} μ_j < 0`.
    pub pairing: f64,
    pub min_matricization_eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SpectrumCheck {
    Feasible { certificate: DualCertificate },
    Infeasible { farkas: FarkasCertificate, primal_witness: Option<PrimalWitness> },
    Inconclusive { message: String },
}

impl SpectrumCheck {
    pub fn status(&self) -> ConicStatus {
        match self {
            SpectrumCheck::Feasible { .. } => ConicStatus::Feasible,
            SpectrumCheck::Infeasible { .. } => ConicStatus::Infeasible,
            SpectrumCheck::Inconclusive { .. } => ConicStatus::Inconclusive,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, SpectrumCheck::Feasible { .. })
    }
}

/// `Σ_j λ_{n-j+1} μ_j`, i.e. `λ` paired in reverse order with `μ`.
fn reverse_pairing(lambda: &[f64], mu: &[f64]) -> f64 {
    lambda.iter().rev().zip(mu).map(|(l, m)| l * m).sum()
}

fn min_matricization_eig(lambda: &[f64], assignments: &[Assignment]) -> f64 {
    assignments
        .iter()
        .map(|a| real_sym_min_eig(&sym_mat_unchecked(lambda, a)).0)
        .fold(f64::INFINITY, f64::min)
}

/// Validates `λ` as an exact primal witness after nudging it towards the
/// uniform spectrum (whose matricizations are positive definite).
fn repair_primal(lambda: &[f64], mu: &[f64], assignments: &[Assignment]) -> Option<PrimalWitness> {
    let mut l: Vec<f64> = lambda.iter().map(|v| v.max(0.0)).collect();
    l.sort_by(|a, b| b.total_cmp(a));
    let s: f64 = l.iter().sum();
    if s.is_nan() || s <= 0.0 {
        return None;
    }
    let n = l.len() as f64;
    l.iter_mut().for_each(|v| *v /= s);
    for eps in [0.0, 1e-10, 1e-8, 1e-6] {
        let cand: Vec<f64> = l.iter().map(|v| (1.0 - eps) * v + eps / n).collect();
        let min_eig = min_matricization_eig(&cand, assignments);
        let pairing = reverse_pairing(&cand, mu);
        if min_eig >= 0.0 && pairing < 0.0 {
            return Some(PrimalWitness { lambda: cand, pairing, min_matricization_eigenvalue: min_eig });
        }
    }
    None
}

/// Feasibility of `Σ_k p↑(L_k*(Y_k)) <= p↓(μ)` with each `Y_k ⪰ 0`, where
/// `cumulative[k]` lists the entries of `Y_k` in target order.
fn cumulative_program(mu: &[f64], d: usize, cumulative: &[Vec<(usize, usize)>]) -> ConicProblem {
    let n = mu.len();
    let mut p = ConicProblem::new();
    let blocks: Vec<usize> = cumulative.iter().map(|_| p.add_block(d, BlockKind::Symmetric)).collect();
    for (r, rhs) in p_down(mu).into_iter().enumerate() {
        let mut terms = Vec::new();
        for (&b, pairs) in blocks.iter().zip(cumulative) {
            for &(i, j) in &pairs[..n - r] {
                terms.push(Term::re(b, i, j, 1.0));
            }
        }
        p.add_le(terms, rhs);
    }
    p
}

fn spectrum_check_from(
    mu: &[f64],
    d: usize,
    assignments: &[Assignment],
    problem: &ConicProblem,
    settings: &SolverSettings,
) -> Result<SpectrumCheck> {
    let res = conic_solve_with(problem, settings, &InteriorPoint)?;
    Ok(match res.status {
        ConicStatus::Feasible => {
            let y: Vec<RMatrix> = res.blocks.iter().map(real_block).collect();
            let slack = DualCertificate::recompute_slack(mu, assignments, &y);
            SpectrumCheck::Feasible { certificate: DualCertificate { y, slack } }
        }
        ConicStatus::Infeasible => {
            let farkas = res.certificate.expect("infeasible results carry a certificate");
            let n = mu.len();
            let w = &farkas.inequality_multipliers;
            // λ_j = Σ_{r <= n-1-j} w_r
            let lambda: Vec<f64> = (0..n).map(|j| w[..n - j].iter().sum()).collect();
            let mut primal_witness = repair_primal(&lambda, mu, assignments);
            if primal_witness.is_none() {
                if let Ok(pv) = primal_min_value_with(mu, d, assignments, settings) {
                    primal_witness = repair_primal(&pv.lambda, mu, assignments);
                }
            }
            SpectrumCheck::Infeasible { farkas, primal_witness }
        }
        ConicStatus::Inconclusive => SpectrumCheck::Inconclusive { message: res.message },
    })
}

/// Necessary condition on the spectrum `μ` (descending, length `d(d+1)/2`)
/// of a decomposable symmetric witness: PSD `Y_k`, one per assignment, with
/// `Σ_k p↑(L_k*(Y_k)) <= p↓(μ)` entrywise.
pub fn decomposable_spectrum_check(mu: &[f64], d: usize, assignments: &[Assignment]) -> Result<SpectrumCheck> {
    decomposable_spectrum_check_with(mu, d, assignments, &SolverSettings::default())
}

pub fn decomposable_spectrum_check_with(
    mu: &[f64],
    d: usize,
    assignments: &[Assignment],
    settings: &SolverSettings,
) -> Result<SpectrumCheck> {
    check_witness_spectrum(mu, sym_dim(d))?;
    check_assignments(d, assignments)?;
    let cumulative: Vec<Vec<(usize, usize)>> = assignments.iter().map(Assignment::pair_of_target).collect();
    let problem = cumulative_program(mu, d, &cumulative);
    spectrum_check_from(mu, d, assignments, &problem, settings)
}

/// Closed form for `d = 2`: `μ3 >= -√(μ1 μ2)`.
pub fn decomposable_spectrum_check_2d(mu1: f64, mu2: f64, mu3: f64) -> Result<bool> {
    check_witness_spectrum(&[mu1, mu2, mu3], 3)?;
    if mu2 < 0.0 {
        return Err(Error::InvalidArgument(format!("mu2 = {mu2} must be non-negative")));
    }
    Ok(mu3 >= -(mu1 * mu2).sqrt())
}

/// Exact feasible region of the `d = 2` cumulative program: `μ3 >= -μ2 - μ1/4`
/// when `μ2 < μ1/4`, else `μ3 >= -√(μ1 μ2)`. Weaker than
/// [`decomposable_spectrum_check_2d`] when `μ2 < μ1/4`.
pub fn spectrum_program_region_2d(mu1: f64, mu2: f64, mu3: f64) -> Result<bool> {
    check_witness_spectrum(&[mu1, mu2, mu3], 3)?;
    if mu2 < 0.0 {
        return Err(Error::InvalidArgument(format!("mu2 = {mu2} must be non-negative")));
    }
    Ok(if mu2 < mu1 / 4.0 { mu3 >= -mu2 - mu1 / 4.0 } else { mu3 >= -(mu1 * mu2).sqrt() })
}

/// Single-block program for `d = 3`, with the cumulative sums taken over
/// `(y13, y12, y22, y23, y33, y11)`.
pub fn decomposable_spectrum_check_3d(mu: &[f64]) -> Result<SpectrumCheck> {
    decomposable_spectrum_check_3d_with(mu, &SolverSettings::default())
}

pub fn decomposable_spectrum_check_3d_with(mu: &[f64], settings: &SolverSettings) -> Result<SpectrumCheck> {
    check_witness_spectrum(mu, 6)?;
    let order = vec![(0, 2), (0, 1), (1, 1), (1, 2), (2, 2), (0, 0)];
    let problem = cumulative_program(mu, 3, &[order]);
    let a = crate::matricize::single_assignment_3d();
    spectrum_check_from(mu, 3, std::slice::from_ref(&a), &problem, settings)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimalValue {
    /// Optimal `Σ_j λ_{n-j+1} μ_j`.
    pub value: f64,
    pub lambda: Vec<f64>,
    /// Objective of the dual iterate; a lower bound on `value` up to the
    /// solver tolerance.
    pub dual_bound: f64,
}

/// `min Σ_j λ_{n-j+1} μ_j` over descending `λ >= 0`, `Σ λ = 1`, with every
/// `L_k(λ)` PSD. Non-negative exactly when the dual check is feasible.
pub fn primal_min_value(mu: &[f64], d: usize, assignments: &[Assignment]) -> Result<PrimalValue> {
    primal_min_value_with(mu, d, assignments, &SolverSettings::default())
}

pub fn primal_min_value_with(
    mu: &[f64],
    d: usize,
    assignments: &[Assignment],
    settings: &SolverSettings,
) -> Result<PrimalValue> {
    let n = sym_dim(d);
    check_witness_spectrum(mu, n)?;
    check_assignments(d, assignments)?;
    let mut p = ConicProblem::new();
    let lam: Vec<usize> = (0..n).map(|_| p.add_free()).collect();
    for w in lam.windows(2) {
        p.add_le(vec![Term::free(w[1], 1.0), Term::free(w[0], -1.0)], 0.0);
    }
    p.add_le(vec![Term::free(lam[n - 1], -1.0)], 0.0);
    p.add_eq(lam.iter().map(|&k| Term::free(k, 1.0)).collect(), 1.0);
    for a in assignments {
        let b = p.add_block(d, BlockKind::Symmetric);
        for (&(i, j), &t) in symspace::sym_pairs(d).iter().zip(a.targets()) {
            let scale = if i == j { 2.0 } else { 1.0 };
            p.add_eq(vec![Term::re(b, i, j, 1.0), Term::free(lam[t], -scale)], 0.0);
        }
    }
    p.objective = (0..n).map(|j| Term::free(lam[n - 1 - j], mu[j])).collect();
    let res = conic_solve_with(&p, settings, &InteriorPoint)?;
    if res.status != ConicStatus::Feasible || !res.optimal {
        return Err(Error::Inconclusive(format!("primal program: {} ({})", res.status, res.message)));
    }
    Ok(PrimalValue { value: res.objective, lambda: res.free.clone(), dual_bound: res.dual_objective })
}

/// Linear map `X ↦ V* X^Γ V` (or `X_s ↦ V*(V X_s V*)^Γ V` when `X` lives on
/// the symmetric subspace) written as terms over the Hermitian parameters of
/// the output.
fn pt_compression_terms(d: usize, symmetric_x: bool) -> Vec<Vec<(usize, usize, f64)>> {
    let v = sym_isometry(d);
    let m = sym_dim(d);
    let n = d * d;
    let nz: Vec<Vec<(usize, f64)>> =
        (0..m).map(|c| (0..n).filter(|&r| v[(r, c)] != 0.0).map(|r| (r, v[(r, c)])).collect()).collect();
    let row_nz: Vec<(usize, f64)> = (0..n)
        .map(|r| (0..m).find(|&c| v[(r, c)] != 0.0).map(|c| (c, v[(r, c)])).expect("every row of V is hit"))
        .collect();
    // out[p * m + q] lists (r, c, coef) with out_pq = Σ coef * X[r][c].
    let mut out = vec![Vec::new(); m * m];
    for p in 0..m {
        for q in p..m {
            let list = &mut out[p * m + q];
            for &(i, vi) in &nz[p] {
                for &(j, vj) in &nz[q] {
                    let (a, b) = (i / d, i % d);
                    let (mm, nn) = (j / d, j % d);
                    let (r, c) = (a * d + nn, mm * d + b);
                    let k = vi * vj;
                    if symmetric_x {
                        let (s, vs) = row_nz[r];
                        let (t, vt) = row_nz[c];
                        list.push((s, t, k * vs * vt));
                    } else {
                        list.push((r, c, k));
                    }
                }
            }
        }
    }
    out
}

/// Adds `Re`/`Im` terms for `coef * X[r][c]` to an equality on the real or
/// imaginary part of an output entry.
fn push_entry_terms(terms: &mut Vec<Term>, block: usize, r: usize, c: usize, coef: f64, imag_part: bool) {
    if !imag_part {
        terms.push(Term::re(block, r, c, coef));
    } else if r != c {
        terms.push(Term::im(block, r, c, coef));
    }
}

/// Splitting `W = P∨ X^Γ P∨ + Y`, expressed on the symmetric subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    /// `d² × d²` PSD operator (symmetric-supported when required).
    pub x: FullOperator,
    pub y: SymOperator,
    /// `max |V*(P∨X^ΓP∨ + Y)V - W_s|`.
    pub residual: f64,
    pub min_eigenvalue_x: f64,
    pub min_eigenvalue_y: f64,
}

/// A symmetric state `Z ⪰ 0` with `Tr(W Z) < 0` that every decomposable
/// witness (of the chosen class) pairs non-negatively with.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparatingState {
    pub z: SymOperator,
    pub overlap: f64,
    pub min_eigenvalue: f64,
    pub min_pt_eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DecomposabilityCheck {
    Decomposable(Decomposition),
    NotDecomposable { state: Option<SeparatingState>, farkas: FarkasCertificate },
    Inconclusive { message: String },
}

impl DecomposabilityCheck {
    pub fn status(&self) -> ConicStatus {
        match self {
            DecomposabilityCheck::Decomposable(_) => ConicStatus::Feasible,
            DecomposabilityCheck::NotDecomposable { .. } => ConicStatus::Infeasible,
            DecomposabilityCheck::Inconclusive { .. } => ConicStatus::Inconclusive,
        }
    }
}

/// `Φ*(Z)` for the chosen class: `(V Z V*)^Γ`, compressed to the symmetric
/// subspace when `X` is required to be symmetric-supported.
fn adjoint_pt(z: &SymOperator, symmetric_x: bool) -> CMatrix {
    let full = partial_transpose(&symspace::embed(z));
    if symmetric_x {
        compress_unchecked(&full).matrix().clone()
    } else {
        full.into_matrix()
    }
}

fn separating_state(
    w_s: &CMatrix,
    d: usize,
    farkas: &FarkasCertificate,
    symmetric_x: bool,
) -> Option<SeparatingState> {
    let m = sym_dim(d);
    let y = &farkas.equality_multipliers;
    let mut z = CMatrix::zeros(m, m);
    let mut k = 0;
    for p in 0..m {
        for q in p..m {
            if p == q {
                z[(p, p)] = C64::new(-y[k], 0.0);
                k += 1;
            } else {
                let (re, im) = (y[k], y[k + 1]);
                z[(p, q)] = -C64::new(re, im) / 2.0;
                z[(q, p)] = -C64::new(re, -im) / 2.0;
                k += 2;
            }
        }
    }
    let tr = z.trace().re;
    if tr.is_nan() || tr <= 0.0 {
        return None;
    }
    z.unscale_mut(tr);
    let zop = SymOperator::new(d, z.clone()).ok()?;
    let min_z = hermitian_eigenvalues(&z).last().copied()?;
    let min_pt = hermitian_eigenvalues(&adjoint_pt(&zop, symmetric_x)).last().copied()?;
    // Φ*(I) has smallest eigenvalue 1/2, so adding εI lifts both checks.
    let eps = (-min_z).max(-2.0 * min_pt).max(0.0) * (1.0 + 1e-6);
    let z = (z + CMatrix::identity(m, m) * C64::new(eps, 0.0)).unscale(1.0 + eps * m as f64);
    let zop = SymOperator::new(d, z.clone()).ok()?;
    let overlap = crate::linalg::inner(w_s, &z);
    let min_eigenvalue = hermitian_eigenvalues(&z).last().copied()?;
    let min_pt_eigenvalue = hermitian_eigenvalues(&adjoint_pt(&zop, symmetric_x)).last().copied()?;
    (overlap < 0.0 && min_eigenvalue >= 0.0 && min_pt_eigenvalue >= 0.0).then_some(SeparatingState {
        z: zop,
        overlap,
        min_eigenvalue,
        min_pt_eigenvalue,
    })
}

/// Feasibility of `W = P∨ X^Γ P∨ + Y` with `X, Y ⪰ 0`, `Y` on the symmetric
/// subspace, and (when `require_symmetric_x`) `P∨ X P∨ = X`.
pub fn is_decomposable_witness(w: &FullOperator, require_symmetric_x: bool) -> Result<DecomposabilityCheck> {
    is_decomposable_witness_with(w, require_symmetric_x, &SolverSettings::default())
}

pub fn is_decomposable_witness_with(
    w: &FullOperator,
    require_symmetric_x: bool,
    settings: &SolverSettings,
) -> Result<DecomposabilityCheck> {
    if !w.is_hermitian() {
        let dev = crate::linalg::hermitian_deviation(w.matrix());
        return Err(Error::NotHermitian(dev));
    }
    let d = w.d();
    let w_s = symspace::compress(w)?.matrix().clone();
    let m = sym_dim(d);
    let mut p = ConicProblem::new();
    let bx = p.add_block(if require_symmetric_x { m } else { d * d }, BlockKind::Hermitian);
    let by = p.add_block(m, BlockKind::Hermitian);
    let map = pt_compression_terms(d, require_symmetric_x);
    for a in 0..m {
        for b in a..m {
            for imag_part in [false, true] {
                if imag_part && a == b {
                    continue;
                }
                let mut terms = Vec::new();
                for &(r, c, k) in &map[a * m + b] {
                    push_entry_terms(&mut terms, bx, r, c, k, imag_part);
                }
                push_entry_terms(&mut terms, by, a, b, 1.0, imag_part);
                let rhs = if imag_part { w_s[(a, b)].im } else { w_s[(a, b)].re };
                p.add_eq(terms, rhs);
            }
        }
    }
    let res = conic_solve_with(&p, settings, &InteriorPoint)?;
    Ok(match res.status {
        ConicStatus::Feasible => {
            let xv = res.blocks[bx].value.clone();
            let yv = res.blocks[by].value.clone();
            let x = if require_symmetric_x {
                symspace::embed(&SymOperator::new(d, hermitian_part(&xv))?)
            } else {
                FullOperator::new(d, hermitian_part(&xv))?
            };
            let y = SymOperator::new(d, hermitian_part(&yv))?;
            let recon = compress_unchecked(&partial_transpose(&x)).matrix() + y.matrix();
            let residual = (recon - &w_s).max_abs();
            let min_eigenvalue_x = *hermitian_eigenvalues(x.matrix()).last().expect("non-empty");
            let min_eigenvalue_y = *hermitian_eigenvalues(y.matrix()).last().expect("non-empty");
            DecomposabilityCheck::Decomposable(Decomposition { x, y, residual, min_eigenvalue_x, min_eigenvalue_y })
        }
        ConicStatus::Infeasible => {
            let farkas = res.certificate.expect("infeasible results carry a certificate");
            let state = separating_state(&w_s, d, &farkas, require_symmetric_x);
            DecomposabilityCheck::NotDecomposable { state, farkas }
        }
        ConicStatus::Inconclusive => DecomposabilityCheck::Inconclusive { message: res.message },
    })
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxOverlapResult {
    /// Optimal `Tr(P ρ)`.
    pub c: f64,
    /// Upper bound on the maximum from the dual iterate.
    pub dual_bound: f64,
    /// Optimal symmetric state in compressed form.
    pub rho: SymOperator,
    pub min_eigenvalue: f64,
    pub min_pt_eigenvalue: f64,
    pub trace_error: f64,
}

impl MaxOverlapResult {
    /// Conservative value: never below the true maximum up to solver error.
    pub fn c_upper(&self) -> f64 {
        self.c.max(self.dual_bound)
    }
}

/// `max Tr(P ρ)` over symmetric states `ρ` whose full partial transpose is PSD.
pub fn max_overlap_ppt(p: &FullOperator, d: usize) -> Result<MaxOverlapResult> {
    max_overlap_ppt_with(p, d, &SolverSettings::default())
}

pub fn max_overlap_ppt_with(proj: &FullOperator, d: usize, settings: &SolverSettings) -> Result<MaxOverlapResult> {
    if proj.d() != d {
        return Err(Error::DimensionMismatch { expected: d, got: proj.d() });
    }
    let p_s = symspace::compress(proj)?.matrix().clone();
    let m = sym_dim(d);
    let n = d * d;
    let v = sym_isometry(d);
    let row_nz: Vec<(usize, f64)> =
        (0..n).map(|r| (0..m).find(|&c| v[(r, c)] != 0.0).map(|c| (c, v[(r, c)])).expect("row hit")).collect();

    let mut prob = ConicProblem::new();
    let br = prob.add_block(m, BlockKind::Hermitian);
    let bs = prob.add_block(n, BlockKind::Hermitian);
    prob.add_eq((0..m).map(|k| Term::re(br, k, k, 1.0)).collect(), 1.0);
    // S[(a,b),(m,n)] = (VρV*)[(a,n),(m,b)]
    for r in 0..n {
        for c in r..n {
            let (a, b) = (r / d, r % d);
            let (mm, nn) = (c / d, c % d);
            let (s, vs) = row_nz[a * d + nn];
            let (t, vt) = row_nz[mm * d + b];
            for imag_part in [false, true] {
                if imag_part && r == c {
                    continue;
                }
                let mut terms = Vec::new();
                push_entry_terms(&mut terms, bs, r, c, 1.0, imag_part);
                push_entry_terms(&mut terms, br, s, t, -vs * vt, imag_part);
                prob.add_eq(terms, 0.0);
            }
        }
    }
    let mut obj = Vec::new();
    hermitian_inner_terms(br, &p_s, -1.0, &mut obj);
    if obj.is_empty() {
        // P = 0: any symmetric PPT state attains zero.
        obj.push(Term::re(br, 0, 0, 0.0));
    }
    prob.objective = obj;

    let res = conic_solve_with(&prob, settings, &InteriorPoint)?;
    if res.status != ConicStatus::Feasible || !res.optimal {
        return Err(Error::Inconclusive(format!("max overlap: {} ({})", res.status, res.message)));
    }
    overlap_result(&res, &p_s, d)
}

fn overlap_result(res: &ConicResult, p_s: &CMatrix, d: usize) -> Result<MaxOverlapResult> {
    let rho = SymOperator::new(d, hermitian_part(&res.blocks[0].value))?;
    let c = crate::linalg::inner(p_s, rho.matrix());
    let min_eigenvalue = *hermitian_eigenvalues(rho.matrix()).last().expect("non-empty");
    let pt = partial_transpose(&symspace::embed(&rho));
    let min_pt_eigenvalue = psd_check_hermitian(pt.matrix(), 0.0)?.min_eigenvalue;
    let trace_error = (rho.matrix().trace().re - 1.0).abs();
    Ok(MaxOverlapResult { c, dual_bound: -res.dual_objective, rho, min_eigenvalue, min_pt_eigenvalue, trace_error })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxNegWitness {
    pub witness: WitnessCandidate,
    pub overlap: MaxOverlapResult,
    /// The value of `c` used in `P∨ - P/c`.
    pub c: f64,
    pub negative_count: usize,
}

/// `W = P∨ - P/c` with `P` the projector onto the NPT subspace and `c` its
/// maximum overlap with symmetric PPT states. Supported for `2 <= d <= 6`.
pub fn build_max_neg_witness(d: usize) -> Result<MaxNegWitness> {
    build_max_neg_witness_with(d, &SolverSettings::default())
}

pub fn build_max_neg_witness_with(d: usize, settings: &SolverSettings) -> Result<MaxNegWitness> {
    if !(2..=6).contains(&d) {
        return Err(Error::UnsupportedDimension { supported: "2..=6", got: d });
    }
    let proj = npt_subspace(d)?.projector();
    let overlap = max_overlap_ppt_with(&proj, d, settings)?;
    let c = overlap.c_upper();
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::Inconclusive(format!("overlap constant {c} outside (0, 1)")));
    }
    let w = projector_sym(d).into_matrix() - proj.matrix().unscale(c);
    let w = FullOperator::new(d, hermitian_part(&w))?;
    let negative_count = count_negative_eigs(&w, settings.tol)?;
    Ok(MaxNegWitness {
        witness: WitnessCandidate { w, provenance: Provenance::MaxNeg { d, c } },
        overlap,
        c,
        negative_count,
    })
}
