use serde::{Deserialize, Serialize};

use super::standard::{Blk, Cone, Entry, StandardForm};
use super::{BackendSolution, ConicBackend, InteriorPoint};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, psd_from_eigenvalues, CMatrix, C64};

pub const DEFAULT_TOL: f64 = 1e-7;
pub const DEFAULT_MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockKind {
    Symmetric,
    Hermitian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSpec {
    pub size: usize,
    pub kind: BlockKind,
}

/// Scalar decision variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "var", rename_all = "snake_case")]
pub enum Var {
    /// `Re X_b[row][col]`.
    Re { block: usize, row: usize, col: usize },
    /// `Im X_b[row][col]`; Hermitian blocks only.
    Im { block: usize, row: usize, col: usize },
    Free { index: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    #[serde(flatten)]
    pub var: Var,
    pub coef: f64,
}

impl Term {
    pub fn re(block: usize, row: usize, col: usize, coef: f64) -> Self {
        Self { var: Var::Re { block, row, col }, coef }
    }

    pub fn im(block: usize, row: usize, col: usize, coef: f64) -> Self {
        Self { var: Var::Im { block, row, col }, coef }
    }

    pub fn free(index: usize, coef: f64) -> Self {
        Self { var: Var::Free { index }, coef }
    }
}

/// `Σ terms = rhs` (equality) or `Σ terms ≤ rhs` (inequality).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub terms: Vec<Term>,
    pub rhs: f64,
}

/// Minimize a linear objective over PSD blocks and free scalars subject to
/// affine equalities and inequalities. An empty objective is a feasibility
/// problem.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConicProblem {
    pub blocks: Vec<BlockSpec>,
    pub n_free: usize,
    pub equalities: Vec<Constraint>,
    pub inequalities: Vec<Constraint>,
    pub objective: Vec<Term>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConicStatus {
    Feasible,
    Infeasible,
    Inconclusive,
}

impl std::fmt::Display for ConicStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ConicStatus::Feasible => "feasible",
            ConicStatus::Infeasible => "infeasible",
            ConicStatus::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "BlockWire", try_from = "BlockWire")]
pub struct BlockValue {
    pub kind: BlockKind,
    pub value: CMatrix,
}

#[derive(Serialize, Deserialize)]
struct BlockWire {
    kind: BlockKind,
    size: usize,
    entries: Vec<[f64; 2]>,
}

impl From<BlockValue> for BlockWire {
    fn from(b: BlockValue) -> Self {
        let n = b.value.nrows();
        let entries = (0..n)
            .flat_map(|r| (0..n).map(move |c| (r, c)))
            .map(|(r, c)| [b.value[(r, c)].re, b.value[(r, c)].im])
            .collect();
        Self { kind: b.kind, size: n, entries }
    }
}

impl TryFrom<BlockWire> for BlockValue {
    type Error = Error;

    fn try_from(w: BlockWire) -> Result<Self> {
        if w.entries.len() != w.size * w.size {
            return Err(Error::DimensionMismatch { expected: w.size * w.size, got: w.entries.len() });
        }
        let value = CMatrix::from_fn(w.size, w.size, |r, c| {
            let [re, im] = w.entries[r * w.size + c];
            C64::new(re, im)
        });
        Ok(Self { kind: w.kind, value })
    }
}

/// Multipliers proving that no point satisfies the constraints:
/// `Σ y_i A_i - Σ w_k G_k ⪯ 0` on every block, zero on free scalars, `w ≥ 0`,
/// and `bᵀy - hᵀw = margin > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FarkasCertificate {
    pub equality_multipliers: Vec<f64>,
    pub inequality_multipliers: Vec<f64>,
    pub margin: f64,
    /// Largest eigenvalue of the combined block functional (should be ≤ 0).
    pub max_eigenvalue: f64,
    pub free_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConicResult {
    pub status: ConicStatus,
    /// Feasible, with primal/dual residuals and gap of the backend iterate
    /// within `tolerance` (meaningful for problems with an objective).
    pub optimal: bool,
    pub blocks: Vec<BlockValue>,
    pub free: Vec<f64>,
    pub objective: f64,
    pub dual_objective: f64,
    /// Max constraint violation of the returned point.
    pub residual: f64,
    /// Smallest eigenvalue over all returned blocks.
    pub min_eigenvalue: f64,
    pub tolerance: f64,
    pub equality_duals: Vec<f64>,
    /// Non-negative multipliers of the `≤` constraints.
    pub inequality_duals: Vec<f64>,
    pub certificate: Option<FarkasCertificate>,
    pub iterations: usize,
    pub backend: String,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL, max_iter: DEFAULT_MAX_ITER }
    }
}

impl SolverSettings {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }

    /// Tolerance handed to the backend; well below the verification tolerance.
    fn inner_tol(&self) -> f64 {
        (self.tol * 1e-2).clamp(1e-12, 1e-8)
    }
}

impl ConicProblem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_block(&mut self, size: usize, kind: BlockKind) -> usize {
        self.blocks.push(BlockSpec { size, kind });
        self.blocks.len() - 1
    }

    pub fn add_free(&mut self) -> usize {
        self.n_free += 1;
        self.n_free - 1
    }

    pub fn add_eq(&mut self, terms: Vec<Term>, rhs: f64) {
        self.equalities.push(Constraint { terms, rhs });
    }

    pub fn add_le(&mut self, terms: Vec<Term>, rhs: f64) {
        self.inequalities.push(Constraint { terms, rhs });
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let p: Self = serde_json::from_str(s)?;
        p.validate()?;
        Ok(p)
    }

    fn check_term(&self, t: &Term, used: &mut [bool]) -> Result<()> {
        let bad = |m: String| Err(Error::MalformedProblem(m));
        if !t.coef.is_finite() {
            return bad("non-finite coefficient".into());
        }
        match t.var {
            Var::Re { block, row, col } | Var::Im { block, row, col } => {
                let Some(spec) = self.blocks.get(block) else {
                    return bad(format!("block {block} does not exist"));
                };
                if row >= spec.size || col >= spec.size {
                    return bad(format!("entry ({row},{col}) outside block {block}"));
                }
                if let Var::Im { .. } = t.var {
                    if spec.kind == BlockKind::Symmetric {
                        return bad(format!("imaginary part of symmetric block {block}"));
                    }
                    if row == col {
                        return bad("imaginary part of a diagonal entry".into());
                    }
                }
                used[block] = true;
            }
            Var::Free { index } if index >= self.n_free => {
                return bad(format!("free variable {index} does not exist"));
            }
            Var::Free { .. } => {}
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.blocks.iter().any(|b| b.size == 0) {
            return Err(Error::MalformedProblem("empty block".into()));
        }
        let mut used = vec![false; self.blocks.len()];
        for c in self.equalities.iter().chain(&self.inequalities) {
            if !c.rhs.is_finite() {
                return Err(Error::MalformedProblem("non-finite right-hand side".into()));
            }
            for t in &c.terms {
                self.check_term(t, &mut used)?;
            }
        }
        for t in &self.objective {
            self.check_term(t, &mut used)?;
        }
        if let Some(b) = used.iter().position(|u| !u) {
            return Err(Error::MalformedProblem(format!("block {b} is never referenced")));
        }
        Ok(())
    }

    fn term_entries(&self, t: &Term, out: &mut Vec<Entry>) {
        let g = t.coef;
        match t.var {
            Var::Re { block, row, col } => {
                let spec = self.blocks[block];
                match spec.kind {
                    BlockKind::Symmetric if row == col => out.push(Entry::new(block, row, row, g)),
                    BlockKind::Symmetric => out.push(Entry::new(block, row, col, g / 2.0)),
                    BlockKind::Hermitian => {
                        let n = spec.size;
                        let w = if row == col { g / 2.0 } else { g / 4.0 };
                        out.push(Entry::new(block, row, col, w));
                        out.push(Entry::new(block, n + row, n + col, w));
                    }
                }
            }
            Var::Im { block, row, col } => {
                let n = self.blocks[block].size;
                out.push(Entry::new(block, col, n + row, g / 4.0));
                out.push(Entry::new(block, row, n + col, -g / 4.0));
            }
            Var::Free { .. } => {}
        }
    }

    fn cones(&self) -> Vec<Cone> {
        self.blocks
            .iter()
            .map(|b| match b.kind {
                BlockKind::Symmetric => Cone::Psd(b.size),
                BlockKind::Hermitian => Cone::Psd(2 * b.size),
            })
            .collect()
    }

    /// Rows: equalities, then inequalities with one slack each in a trailing
    /// non-negative block.
    pub fn to_standard(&self) -> StandardForm {
        let mut sf = StandardForm { cones: self.cones(), ..Default::default() };
        let n_ineq = self.inequalities.len();
        let slack_block = sf.cones.len();
        if n_ineq > 0 {
            sf.cones.push(Cone::Nonneg(n_ineq));
        }
        sf.free = vec![Vec::new(); self.n_free];
        sf.c_free = vec![0.0; self.n_free];
        let rows = self.equalities.iter().chain(&self.inequalities);
        for (i, c) in rows.enumerate() {
            let mut row = Vec::new();
            for t in &c.terms {
                self.term_entries(t, &mut row);
                if let Var::Free { index } = t.var {
                    sf.free[index].push((i, t.coef));
                }
            }
            if i >= self.equalities.len() {
                let k = i - self.equalities.len();
                row.push(Entry::new(slack_block, k, k, 1.0));
            }
            sf.a.push(row);
            sf.b.push(c.rhs);
        }
        for t in &self.objective {
            self.term_entries(t, &mut sf.c);
            if let Var::Free { index } = t.var {
                sf.c_free[index] += t.coef;
            }
        }
        sf
    }

    fn blocks_from(&self, x: &[Blk]) -> Vec<BlockValue> {
        self.blocks
            .iter()
            .zip(x)
            .map(|(spec, blk)| {
                let Blk::Dense(m) = blk else { unreachable!() };
                let n = spec.size;
                let value = match spec.kind {
                    BlockKind::Symmetric => {
                        CMatrix::from_fn(n, n, |r, c| C64::new(0.5 * (m[(r, c)] + m[(c, r)]), 0.0))
                    }
                    BlockKind::Hermitian => CMatrix::from_fn(n, n, |r, c| {
                        let re = 0.25 * (m[(r, c)] + m[(c, r)] + m[(n + r, n + c)] + m[(n + c, n + r)]);
                        let im = 0.25 * (m[(n + r, c)] - m[(r, n + c)] - m[(n + c, r)] + m[(c, n + r)]);
                        C64::new(re, im)
                    }),
                };
                BlockValue { kind: spec.kind, value }
            })
            .collect()
    }

    fn term_value(&self, t: &Term, blocks: &[BlockValue], free: &[f64]) -> f64 {
        t.coef
            * match t.var {
                Var::Re { block, row, col } => blocks[block].value[(row, col)].re,
                Var::Im { block, row, col } => blocks[block].value[(row, col)].im,
                Var::Free { index } => free[index],
            }
    }

    pub fn evaluate(&self, terms: &[Term], blocks: &[BlockValue], free: &[f64]) -> f64 {
        terms.iter().map(|t| self.term_value(t, blocks, free)).sum()
    }

    /// Max violation of all constraints at the given point.
    pub fn residual(&self, blocks: &[BlockValue], free: &[f64]) -> f64 {
        let eq = self
            .equalities
            .iter()
            .map(|c| (self.evaluate(&c.terms, blocks, free) - c.rhs).abs());
        let le = self
            .inequalities
            .iter()
            .map(|c| (self.evaluate(&c.terms, blocks, free) - c.rhs).max(0.0));
        eq.chain(le).fold(0.0, f64::max)
    }

    pub fn rhs_scale(&self) -> f64 {
        self.equalities
            .iter()
            .chain(&self.inequalities)
            .map(|c| c.rhs.abs())
            .fold(1.0, f64::max)
    }

    /// Hermitian matrix `S` with `Re Tr(S X_b) = Σ` of the given block terms.
    fn add_term_matrix(&self, t: &Term, s: f64, mats: &mut [CMatrix], free: &mut [f64]) {
        let g = s * t.coef;
        match t.var {
            Var::Re { block, row, col } if row == col => mats[block][(row, row)] += C64::new(g, 0.0),
            Var::Re { block, row, col } => {
                mats[block][(row, col)] += C64::new(g / 2.0, 0.0);
                mats[block][(col, row)] += C64::new(g / 2.0, 0.0);
            }
            Var::Im { block, row, col } => {
                mats[block][(row, col)] += C64::new(0.0, g / 2.0);
                mats[block][(col, row)] += C64::new(0.0, -g / 2.0);
            }
            Var::Free { index } => free[index] += g,
        }
    }

    /// Checks a candidate Farkas certificate directly against the problem data.
    pub fn check_farkas(&self, y: &[f64], w: &[f64], tol: f64) -> Option<FarkasCertificate> {
        if w.iter().any(|&v| v < 0.0) {
            return None;
        }
        let mut mats: Vec<CMatrix> = self.blocks.iter().map(|b| CMatrix::zeros(b.size, b.size)).collect();
        let mut fr = vec![0.0; self.n_free];
        for (c, &yi) in self.equalities.iter().zip(y) {
            for t in &c.terms {
                self.add_term_matrix(t, yi, &mut mats, &mut fr);
            }
        }
        for (c, &wk) in self.inequalities.iter().zip(w) {
            for t in &c.terms {
                self.add_term_matrix(t, -wk, &mut mats, &mut fr);
            }
        }
        let margin = self.equalities.iter().zip(y).map(|(c, v)| c.rhs * v).sum::<f64>()
            - self.inequalities.iter().zip(w).map(|(c, v)| c.rhs * v).sum::<f64>();
        let max_eigenvalue = mats
            .iter()
            .map(|m| hermitian_eigenvalues(m)[0])
            .fold(f64::NEG_INFINITY, f64::max);
        let free_residual = fr.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let mult_scale = y.iter().chain(w).fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
        let ok = margin > 10.0 * tol * self.rhs_scale() * mult_scale
            && max_eigenvalue <= tol * mult_scale
            && free_residual <= tol * mult_scale;
        ok.then(|| FarkasCertificate {
            equality_multipliers: y.to_vec(),
            inequality_multipliers: w.to_vec(),
            margin,
            max_eigenvalue,
            free_residual,
        })
    }

    /// Minimizes the total violation `Σ (e⁺_i + e⁻_i)`; its dual multipliers
    /// are Farkas candidates when the minimum is positive.
    fn phase_one(sf: &StandardForm) -> StandardForm {
        let p = sf.n_rows();
        let mut aux = sf.clone();
        aux.c.clear();
        aux.c_free.iter_mut().for_each(|v| *v = 0.0);
        let blk = aux.cones.len();
        aux.cones.push(Cone::Nonneg(2 * p));
        for (i, row) in aux.a.iter_mut().enumerate() {
            row.push(Entry::new(blk, 2 * i, 2 * i, 1.0));
            row.push(Entry::new(blk, 2 * i + 1, 2 * i + 1, -1.0));
        }
        aux.c = (0..2 * p).map(|k| Entry::new(blk, k, k, 1.0)).collect();
        aux
    }

    fn assemble(&self, sol: &BackendSolution, settings: &SolverSettings, backend: &str) -> ConicResult {
        let blocks = self.blocks_from(&sol.x);
        let free = sol.u.clone();
        let residual = self.residual(&blocks, &free);
        let mut psd = true;
        let mut min_eigenvalue = f64::INFINITY;
        for b in &blocks {
            let chk = psd_from_eigenvalues(&hermitian_eigenvalues(&b.value), settings.tol);
            psd &= chk.is_psd;
            min_eigenvalue = min_eigenvalue.min(chk.min_eigenvalue);
        }
        let feasible = psd && residual <= settings.tol * self.rhs_scale();
        let n_eq = self.equalities.len();
        ConicResult {
            status: if feasible { ConicStatus::Feasible } else { ConicStatus::Inconclusive },
            optimal: feasible && (sol.converged || sol.merit <= settings.tol),
            objective: self.evaluate(&self.objective, &blocks, &free),
            dual_objective: sol.dual_objective,
            blocks,
            free,
            residual,
            min_eigenvalue,
            tolerance: settings.tol,
            equality_duals: sol.y[..n_eq].to_vec(),
            inequality_duals: sol.y[n_eq..].iter().map(|v| -v).collect(),
            certificate: None,
            iterations: sol.iterations,
            backend: backend.to_string(),
            message: sol.message.clone(),
        }
    }
}

/// Solves with the default interior-point backend.
pub fn conic_solve(p: &ConicProblem, tol: f64) -> Result<ConicResult> {
    conic_solve_with(p, &SolverSettings::with_tol(tol), &InteriorPoint)
}

/// Solves, then verifies the answer against the original data: a returned
/// point is `feasible` only if its residual and PSD checks pass at `tol`, and
/// `infeasible` only with a checked Farkas certificate. Anything else is
/// `inconclusive`.
pub fn conic_solve_with(
    p: &ConicProblem,
    settings: &SolverSettings,
    backend: &dyn ConicBackend,
) -> Result<ConicResult> {
    if !(settings.tol > 0.0 && settings.tol.is_finite()) {
        return Err(Error::InvalidArgument(format!("tolerance {}", settings.tol)));
    }
    p.validate()?;
    let sf = p.to_standard();
    let sol = backend.solve(&sf, settings.inner_tol(), settings.max_iter);
    let mut res = p.assemble(&sol, settings, backend.name());
    if res.status == ConicStatus::Feasible {
        return Ok(res);
    }
    let aux = ConicProblem::phase_one(&sf);
    let sol1 = backend.solve(&aux, settings.inner_tol(), settings.max_iter);
    res.iterations += sol1.iterations;
    let from_aux = p.assemble(&sol1, settings, backend.name());
    if from_aux.status == ConicStatus::Feasible {
        res.status = ConicStatus::Feasible;
        res.optimal = false;
        res.blocks = from_aux.blocks;
        res.free = from_aux.free;
        res.objective = from_aux.objective;
        res.residual = from_aux.residual;
        res.min_eigenvalue = from_aux.min_eigenvalue;
        res.message = "feasible point from phase one".into();
        return Ok(res);
    }
    let n_eq = p.equalities.len();
    let y = &sol1.y[..n_eq];
    let w: Vec<f64> = sol1.y[n_eq..].iter().map(|v| (-v).max(0.0)).collect();
    match p.check_farkas(y, &w, settings.tol) {
        Some(cert) => {
            res.status = ConicStatus::Infeasible;
            res.certificate = Some(cert);
            res.message = "infeasibility certificate verified".into();
        }
        None => {
            res.message = format!(
                "no verified point or certificate (main: {}; phase one: {})",
                sol.message, sol1.message
            );
        }
    }
    Ok(res)
}
