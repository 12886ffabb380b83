//! Brute-force oracles and seeded randomized searches used to cross-check
//! the closed forms and to reproduce the observed negative-eigenvalue counts.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::DenseJson;
use crate::linalg::{self, CMatrix, CVector, C64};
use crate::rng;
use crate::symspace::{self, sym_dim, FullOperator, SymOperator};
use crate::witness::{count_negative_eigs_matrix, max_neg_bounds, sym_witness_compressed};

pub use crate::linalg::PsdCheck;

/// Shared PSD test: `min eig >= -tol * max(1, max|eig|)`. Errors on
/// non-Hermitian input.
pub fn psd_check(m: &CMatrix, tol: f64) -> Result<PsdCheck> {
    linalg::psd_check_hermitian(m, tol)
}

const BRUTE_MAX_N: usize = 8;

/// `min_π Σ_j λ_π(j) μ_j` by enumerating all `n!` permutations (`n <= 8`).
pub fn brute_min_permutation(lambda: &[f64], mu: &[f64]) -> Result<f64> {
    let n = lambda.len();
    if mu.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: mu.len() });
    }
    if n > BRUTE_MAX_N {
        return Err(Error::EnumerationTooLarge { count: format!("{n}! permutations") });
    }
    Ok((0..n)
        .permutations(n)
        .map(|p| p.iter().zip(mu).map(|(&i, m)| lambda[i] * m).sum::<f64>())
        .fold(f64::INFINITY, f64::min))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PptScanReport {
    pub d: usize,
    pub trials: usize,
    pub seed: u64,
    /// Smallest eigenvalue of `V*(V U diag(λ) U* V*)^Γ V` seen.
    pub min_eigenvalue: f64,
    pub min_trial: usize,
    /// Symmetric-space unitary of the most negative trial, when negative.
    pub violating_unitary: Option<DenseJson>,
}

impl PptScanReport {
    pub fn violated(&self, tol: f64) -> bool {
        self.min_eigenvalue < -tol
    }
}

fn scan_trial(lambda: &[f64], d: usize, seed: u64, t: usize) -> (f64, CMatrix) {
    let mut r = rng::stream(seed, t as u64);
    let u = linalg::haar_unitary(lambda.len(), &mut r);
    let rho = SymOperator::new(d, linalg::conjugate_diag(&u, lambda)).expect("m x m");
    let pt = symspace::sym_pt_compressed(&symspace::embed(&rho));
    let ev = linalg::hermitian_eigenvalues(pt.matrix());
    (*ev.last().expect("non-empty"), u)
}

/// Minimum over Haar-random `U` on the symmetric space of the least eigenvalue
/// of the compressed `P∨ (U diag(λ) U*)^Γ P∨`, with `diag` in the canonical
/// symmetric basis. Trial `t` uses stream `t` of `seed`.
pub fn random_unitary_ppt_scan(lambda: &[f64], d: usize, trials: usize, seed: u64) -> Result<PptScanReport> {
    let m = sym_dim(d);
    if lambda.len() != m {
        return Err(Error::DimensionMismatch { expected: m, got: lambda.len() });
    }
    let results: Vec<f64> = map_trials(trials, |t| scan_trial(lambda, d, seed, t).0);
    let (min_trial, &min_eigenvalue) = results
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .unwrap_or((0, &f64::INFINITY));
    let violating_unitary = (min_eigenvalue < 0.0).then(|| {
        let (_, u) = scan_trial(lambda, d, seed, min_trial);
        DenseJson::from_matrix(d, &u)
    });
    Ok(PptScanReport { d, trials, seed, min_eigenvalue, min_trial, violating_unitary })
}

#[cfg(feature = "parallel")]
fn map_trials<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_trials<T>(n: usize, f: impl Fn(usize) -> T) -> Vec<T> {
    (0..n).map(f).collect()
}

/// Number of worker threads trials are spread over.
pub fn worker_count() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VectorClass {
    ComplexFull,
    RealFull,
    ComplexSym,
    RealSym,
}

impl VectorClass {
    pub const ALL: [VectorClass; 4] =
        [VectorClass::ComplexFull, VectorClass::RealFull, VectorClass::ComplexSym, VectorClass::RealSym];

    fn is_real(self) -> bool {
        matches!(self, VectorClass::RealFull | VectorClass::RealSym)
    }

    fn is_sym(self) -> bool {
        matches!(self, VectorClass::ComplexSym | VectorClass::RealSym)
    }

    /// Gaussian vector in `C^d ⊗ C^d`, realified and/or symmetrized.
    pub fn sample(self, d: usize, r: &mut rng::Rng) -> CVector {
        let mut v = CVector::from_fn(d * d, |_, _| {
            if self.is_real() {
                C64::new(r.sample(StandardNormal), 0.0)
            } else {
                linalg::complex_normal(r)
            }
        });
        if self.is_sym() {
            let w = v.clone();
            for a in 0..d {
                for b in 0..d {
                    v[a * d + b] = (w[a * d + b] + w[b * d + a]) * 0.5;
                }
            }
        }
        let n = v.norm();
        v.unscale(n)
    }
}

impl fmt::Display for VectorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VectorClass::ComplexFull => "complex_full",
            VectorClass::RealFull => "real_full",
            VectorClass::ComplexSym => "complex_sym",
            VectorClass::RealSym => "real_sym",
        })
    }
}

impl FromStr for VectorClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.replace('-', "_").as_str() {
            "complex_full" => VectorClass::ComplexFull,
            "real_full" => VectorClass::RealFull,
            "complex_sym" => VectorClass::ComplexSym,
            "real_sym" => VectorClass::RealSym,
            other => return Err(Error::InvalidArgument(format!("unknown vector class {other:?}"))),
        })
    }
}

/// Relative threshold for counting an eigenvalue as negative.
pub const SEARCH_NEG_TOL: f64 = 1e-8;

/// Negative eigenvalues of `P∨(vv*)^Γ P∨` for the vector drawn at trial `t`.
pub fn search_trial(d: usize, class: VectorClass, seed: u64, t: u64) -> (usize, CVector) {
    let mut r = rng::stream(seed, t);
    let v = class.sample(d, &mut r);
    let w = sym_witness_compressed(&v, d);
    let count = count_negative_eigs_matrix(&w, SEARCH_NEG_TOL).expect("Hermitian by construction");
    (count, v)
}

/// Resumable state of a negative-eigenvalue search; doubles as the JSON
/// checkpoint. Results depend only on `(d, class, seed, next_trial)`, not
/// on how the trials were split into runs or across workers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchCheckpoint {
    pub d: usize,
    pub vector_class: VectorClass,
    pub seed: u64,
    pub next_trial: u64,
    pub best_count: usize,
    pub best_trial: Option<u64>,
    /// `histogram[k]` = trials with exactly `k` negative eigenvalues.
    pub histogram: Vec<u64>,
}

impl SearchCheckpoint {
    pub fn new(d: usize, vector_class: VectorClass, seed: u64) -> Result<Self> {
        if !(1..=12).contains(&d) {
            return Err(Error::UnsupportedDimension { supported: "1..=12", got: d });
        }
        Ok(Self {
            d,
            vector_class,
            seed,
            next_trial: 0,
            best_count: 0,
            best_trial: None,
            histogram: vec![0; sym_dim(d) + 1],
        })
    }

    /// Runs trials `next_trial .. next_trial + n`.
    pub fn advance(&mut self, n: u64) {
        let start = self.next_trial;
        let (d, class, seed) = (self.d, self.vector_class, self.seed);
        let counts = map_trials(n as usize, |i| search_trial(d, class, seed, start + i as u64).0);
        for (i, c) in counts.into_iter().enumerate() {
            self.histogram[c] += 1;
            if c > self.best_count || self.best_trial.is_none() {
                self.best_count = c;
                self.best_trial = Some(start + i as u64);
            }
        }
        self.next_trial += n;
    }

    pub fn report(&self) -> SearchReport {
        let best_vector = self.best_trial.map(|t| {
            let (_, v) = search_trial(self.d, self.vector_class, self.seed, t);
            v.iter().map(|z| [z.re, z.im]).collect()
        });
        SearchReport {
            d: self.d,
            vector_class: self.vector_class,
            trials: self.next_trial,
            seed: self.seed,
            best_count: self.best_count,
            best_trial: self.best_trial,
            best_vector: best_vector.unwrap_or_default(),
            histogram: self.histogram.clone(),
            workers: worker_count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub d: usize,
    pub vector_class: VectorClass,
    pub trials: u64,
    pub seed: u64,
    /// Observed maximum; a lower bound on the true maximum.
    pub best_count: usize,
    pub best_trial: Option<u64>,
    /// Unit vector in `C^d ⊗ C^d` as `[re, im]` pairs.
    pub best_vector: Vec<[f64; 2]>,
    pub histogram: Vec<u64>,
    pub workers: usize,
}

impl SearchReport {
    /// `count,frequency` rows for every count up to `d(d+1)/2`.
    pub fn histogram_csv(&self) -> String {
        let mut s = String::from("count,frequency\n");
        for (k, f) in self.histogram.iter().enumerate() {
            s.push_str(&format!("{k},{f}\n"));
        }
        s
    }

    /// The documented caps: `d(d-1)/2` for every class and `⌊d²/4⌋` for
    /// real symmetric vectors.
    pub fn within_bounds(&self) -> bool {
        let (real_sym, general) = max_neg_bounds(self.d);
        self.best_count <= general && (self.vector_class != VectorClass::RealSym || self.best_count <= real_sym)
    }
}

/// Seeded search for the largest number of negative eigenvalues of
/// `P∨(vv*)^Γ P∨` over `trials` random vectors of the given class.
pub fn search_neg_eigs(d: usize, class: VectorClass, trials: u64, seed: u64) -> Result<SearchReport> {
    let mut st = SearchCheckpoint::new(d, class, seed)?;
    st.advance(trials);
    Ok(st.report())
}

/// Random symmetric state with PSD partial transpose: a random symmetric
/// density matrix mixed with the maximally mixed symmetric state, with the
/// smallest mixing weight (to bisection accuracy) that makes it PPT.
pub fn random_sym_ppt_state(d: usize, r: &mut rng::Rng) -> FullOperator {
    let m = sym_dim(d);
    let rank = 1 + (r.random::<u32>() as usize % m);
    let rho = linalg::random_density(m, rank, r);
    let mixed = CMatrix::identity(m, m).unscale(m as f64);
    let at = |p: f64| {
        let s = SymOperator::new(d, rho.scale(1.0 - p) + mixed.scale(p)).expect("m x m");
        symspace::embed(&s)
    };
    let ppt = |p: f64| {
        let pt = symspace::partial_transpose(&at(p));
        *linalg::hermitian_eigenvalues(pt.matrix()).last().expect("non-empty") >= 0.0
    };
    if ppt(0.0) {
        return at(0.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if ppt(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    at(hi)
}

/// `min Tr(W ρ)` over `n` random symmetric PPT states.
pub fn min_on_sym_ppt_states(w: &FullOperator, n: usize, seed: u64) -> f64 {
    let d = w.d();
    map_trials(n, |t| {
        let mut r = rng::stream(seed, t as u64);
        let rho = random_sym_ppt_state(d, &mut r);
        linalg::inner(w.matrix(), rho.matrix())
    })
    .into_iter()
    .fold(f64::INFINITY, f64::min)
}
