//! Spectral conditions for absolute symmetric PPT / separability and the
//! bosonic two-qubit concurrence.

use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::MaxAbs;
use crate::linalg::{self, CMatrix, C64, PSD_REL_TOL};
use crate::matricize::{
    self, conjectured_assignments_4d, single_assignment_3d, enumerate_assignments, Assignment,
};
use crate::rng::Rng;
use crate::symspace::{sym_dim, SymOperator};

/// Width of the band around zero in which verdicts are flagged marginal.
pub const MARGINAL_BAND: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumKind {
    State,
    Witness,
}

/// Eigenvalues sorted non-increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    values: Vec<f64>,
    kind: SpectrumKind,
}

impl Spectrum {
    /// Sorts the input; requires non-negative entries summing to one.
    pub fn state(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::NotAState("empty spectrum".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < -1e-12) {
            return Err(Error::NotAState(format!("entry {v} is negative")));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > 1e-10 {
            return Err(Error::NotAState(format!("entries sum to {sum}")));
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { values, kind: SpectrumKind::State })
    }

    /// Sorts the input; any real values.
    pub fn witness(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        Self { values, kind: SpectrumKind::Witness }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> SpectrumKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Which set of matricizations [`is_abs_sym_ppt`] inspects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMode {
    /// Smallest known sufficient set for the dimension.
    Fastpath,
    /// One matricization per sampled product ordering.
    Reduced,
    /// Every matricization (`d <= 3`).
    Full,
    /// The four-matrix test at `d = 4`, unproven.
    Conjectural,
}

impl fmt::Display for CheckMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckMode::Fastpath => "fastpath",
            CheckMode::Reduced => "reduced",
            CheckMode::Full => "full",
            CheckMode::Conjectural => "conjectural",
        })
    }
}

impl FromStr for CheckMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fastpath" => Ok(Self::Fastpath),
            "reduced" => Ok(Self::Reduced),
            "full" => Ok(Self::Full),
            "conjectural" => Ok(Self::Conjectural),
            _ => Err(Error::InvalidArgument(format!("unknown mode {s:?}"))),
        }
    }
}

/// A matricization with a negative eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub assignment: Assignment,
    pub min_eigenvalue: f64,
    pub eigenvector: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbsPptVerdict {
    pub holds: bool,
    /// Smallest eigenvalue is within [`MARGINAL_BAND`] of zero.
    pub marginal: bool,
    pub mode: CheckMode,
    pub min_eigenvalue: f64,
    pub assignments_checked: usize,
    pub certificate: Option<Certificate>,
}

fn check_sorted(xs: &[f64]) -> Result<()> {
    if xs.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::Unsorted);
    }
    Ok(())
}

fn check_state_values(xs: &[f64]) -> Result<()> {
    check_sorted(xs)?;
    if xs.iter().any(|&x| x < -1e-12) {
        return Err(Error::NotAState("negative eigenvalue".into()));
    }
    Ok(())
}

fn min_eig_small(m: &linalg::RMatrix) -> f64 {
    if m.nrows() == 2 {
        let (a, b, c) = (m[(0, 0)], m[(0, 1)], m[(1, 1)]);
        let h = 0.5 * (a + c);
        return h - (0.25 * (a - c) * (a - c) + b * b).sqrt();
    }
    linalg::real_sym_eigenvalues(m).last().copied().unwrap_or(0.0)
}

/// Run the PSD test over `set`, stopping at the first failing matricization.
pub fn check_assignments(lambda: &[f64], set: &[Assignment], mode: CheckMode) -> AbsPptVerdict {
    let mut worst = f64::INFINITY;
    for (n, a) in set.iter().enumerate() {
        let s = matricize::sym_mat_unchecked(lambda, a);
        let scale = s.max_abs();
        let me = min_eig_small(&s);
        worst = worst.min(me);
        if me < -PSD_REL_TOL * scale.max(1.0) {
            let (me, v) = linalg::real_sym_min_eig(&s);
            return AbsPptVerdict {
                holds: false,
                marginal: me.abs() <= MARGINAL_BAND,
                mode,
                min_eigenvalue: me,
                assignments_checked: n + 1,
                certificate: Some(Certificate { assignment: a.clone(), min_eigenvalue: me, eigenvector: v }),
            };
        }
    }
    AbsPptVerdict {
        holds: true,
        marginal: worst.abs() <= MARGINAL_BAND,
        mode,
        min_eigenvalue: worst,
        assignments_checked: set.len(),
        certificate: None,
    }
}

/// Absolute symmetric PPT test of a state spectrum on `Sym(C^d ⊗ C^d)`.
///
/// For `d >= 3` a positive verdict means PPT only.
pub fn is_abs_sym_ppt(lambda: &Spectrum, d: usize, mode: CheckMode) -> Result<AbsPptVerdict> {
    if d == 0 {
        return Err(Error::InvalidDimension(d));
    }
    if lambda.len() != sym_dim(d) {
        return Err(Error::DimensionMismatch { expected: sym_dim(d), got: lambda.len() });
    }
    if lambda.kind() != SpectrumKind::State {
        return Err(Error::NotAState("witness spectrum given".into()));
    }
    let x = lambda.values();
    let verdict = match (mode, d) {
        (_, 1) => check_assignments(x, &enumerate_assignments(1)?, mode),
        (CheckMode::Full, _) => check_assignments(x, &enumerate_assignments(d)?, mode),
        (CheckMode::Reduced, _) => check_assignments(x, matricize::reduced_assignments_cached(d)?, mode),
        (CheckMode::Conjectural, 4) | (CheckMode::Fastpath, 4) => {
            check_assignments(x, &conjectured_assignments_4d(), CheckMode::Conjectural)
        }
        (CheckMode::Conjectural, _) => {
            return Err(Error::UnsupportedDimension { supported: "4", got: d });
        }
        (CheckMode::Fastpath, 2) => check_assignments(x, &[matricize::reduced_assignment_2d()], mode),
        (CheckMode::Fastpath, 3) => check_assignments(x, &[single_assignment_3d()], mode),
        (CheckMode::Fastpath, _) => {
            let mut v = check_assignments(x, matricize::reduced_assignments_cached(d)?, CheckMode::Reduced);
            v.mode = CheckMode::Reduced;
            v
        }
    };
    Ok(verdict)
}

/// `λ1 <= 2 √(λ2 λ3)` up to the shared tolerance.
pub fn is_abs_sym_ppt_2d(l1: f64, l2: f64, l3: f64) -> Result<bool> {
    check_state_values(&[l1, l2, l3])?;
    Ok(l1 - 2.0 * (l2 * l3).sqrt() <= PSD_REL_TOL * l1.max(1.0))
}

/// Same test as [`is_abs_sym_ppt_2d`]; at `d = 2` PPT and separability coincide.
pub fn is_abs_sym_separable_2d(l1: f64, l2: f64, l3: f64) -> Result<bool> {
    is_abs_sym_ppt_2d(l1, l2, l3)
}

/// PSD test of `[[2λ6, λ2, λ1], [λ2, 2λ3, λ4], [λ1, λ4, 2λ5]]`.
pub fn is_abs_sym_ppt_3d(lambda: &[f64]) -> Result<bool> {
    if lambda.len() != 6 {
        return Err(Error::DimensionMismatch { expected: 6, got: lambda.len() });
    }
    check_state_values(lambda)?;
    let l = |k: usize| lambda[k - 1];
    let m = linalg::RMatrix::from_row_slice(
        3,
        3,
        &[2.0 * l(6), l(2), l(1), l(2), 2.0 * l(3), l(4), l(1), l(4), 2.0 * l(5)],
    );
    Ok(linalg::psd_from_eigenvalues(&linalg::real_sym_eigenvalues(&m), PSD_REL_TOL).is_psd)
}

/// The four-matrix test at `d = 4`. Unproven; callers should label it conjectural.
pub fn is_abs_sym_ppt_4d_conjectured(lambda: &[f64]) -> Result<bool> {
    if lambda.len() != 10 {
        return Err(Error::DimensionMismatch { expected: 10, got: lambda.len() });
    }
    check_state_values(lambda)?;
    Ok(check_assignments(lambda, &conjectured_assignments_4d(), CheckMode::Conjectural).holds)
}

/// Cheap pre-filter: a spectrum with a (numerically) zero eigenvalue fails.
pub fn full_rank_necessary(lambda: &[f64]) -> bool {
    lambda.iter().copied().fold(f64::INFINITY, f64::min) > PSD_REL_TOL
}

/// The spin-flip operator on the two-qubit symmetric subspace.
#[derive(Debug, Clone, Copy, Default)]
pub struct SpinFlip;

impl SpinFlip {
    pub fn matrix(&self) -> CMatrix {
        let z = C64::new(0.0, 0.0);
        let o = C64::new(1.0, 0.0);
        CMatrix::from_row_slice(3, 3, &[z, z, o, z, -o, z, o, z, z])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcurrenceResult {
    pub value: f64,
    pub nu: [f64; 3],
}

/// Concurrence of a symmetric two-qubit state given on `Sym(C^2 ⊗ C^2)`.
///
/// The square roots of the eigenvalues of `ρ S ρ̄ S` are the singular values
/// of `√ρ S √ρ̄`, which avoids taking square roots of rounding noise.
pub fn concurrence_2qubit(rho: &SymOperator) -> Result<ConcurrenceResult> {
    if rho.d() != 2 {
        return Err(Error::UnsupportedDimension { supported: "2", got: rho.d() });
    }
    let m = rho.matrix();
    let psd = linalg::psd_check_hermitian(m, PSD_REL_TOL).map_err(|e| Error::NotAState(e.to_string()))?;
    if !psd.is_psd {
        return Err(Error::NotAState(format!("min eigenvalue {}", psd.min_eigenvalue)));
    }
    let tr = m.trace();
    if (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-8 {
        return Err(Error::NotAState(format!("trace {tr}")));
    }
    let (vals, vecs) = linalg::hermitian_eigh(&linalg::hermitian_part(m));
    let sqrt_vals: Vec<f64> = vals.iter().map(|v| v.max(0.0).sqrt()).collect();
    let sq = linalg::conjugate_diag(&vecs, &sqrt_vals);
    let prod = &sq * SpinFlip.matrix() * sq.map(|z| z.conj());
    let mut nu: Vec<f64> = prod.singular_values().iter().copied().collect();
    nu.sort_by(|a, b| b.total_cmp(a));
    let nu = [nu[0], nu[1], nu[2]];
    Ok(ConcurrenceResult { value: (nu[0] - nu[1] - nu[2]).max(0.0), nu })
}

/// `Σ_j λ_{n-j+1} μ_j`: the minimum of `Σ λ_π(j) μ_j` over permutations.
pub fn min_witness_pairing(lambda: &Spectrum, mu: &Spectrum) -> Result<f64> {
    pairing_sorted(lambda.values(), mu.values())
}

/// [`min_witness_pairing`] on raw slices (sorted internally).
pub fn pairing_sorted(lambda: &[f64], mu: &[f64]) -> Result<f64> {
    if lambda.len() != mu.len() {
        return Err(Error::DimensionMismatch { expected: lambda.len(), got: mu.len() });
    }
    let mut l = lambda.to_vec();
    let mut m = mu.to_vec();
    l.sort_by(|a, b| b.total_cmp(a));
    m.sort_by(|a, b| b.total_cmp(a));
    Ok(l.iter().rev().zip(&m).map(|(a, b)| a * b).sum())
}

/// Uniformly random point of the probability simplex, sorted non-increasing.
pub fn random_spectrum(n: usize, rng: &mut Rng) -> Vec<f64> {
    let mut x: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= s);
    x.sort_by(|a, b| b.total_cmp(a));
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_density;
    use crate::rng;
    use crate::symspace::{compress, tensor_square, FullOperator};
    use proptest::prelude::*;

    fn st(v: &[f64]) -> Spectrum {
        Spectrum::state(v.to_vec()).unwrap()
    }

    #[test]
    fn spectrum_validation() {
        assert!(Spectrum::state(vec![0.5, 0.6]).is_err());
        assert!(Spectrum::state(vec![1.2, -0.2]).is_err());
        assert_eq!(st(&[0.2, 0.8]).values(), &[0.8, 0.2]);
        assert_eq!(Spectrum::witness(vec![-1.0, 2.0]).values(), &[2.0, -1.0]);
    }

    #[test]
    fn abs_ppt_examples() {
        let third = 1.0 / 3.0;
        for mode in [CheckMode::Fastpath, CheckMode::Full, CheckMode::Reduced] {
            assert!(is_abs_sym_ppt(&st(&[third; 3]), 2, mode).unwrap().holds);
            let v = is_abs_sym_ppt(&st(&[0.6, 0.2, 0.2]), 2, mode).unwrap();
            assert!(!v.holds);
            let cert = v.certificate.unwrap();
            assert!(cert.min_eigenvalue < -PSD_REL_TOL);
            let s = matricize::symmetric_matricization(&[0.6, 0.2, 0.2], &cert.assignment).unwrap();
            let x = nalgebra::DVector::from_vec(cert.eigenvector.clone());
            assert!((s * &x - &x * cert.min_eigenvalue).max_abs() < 1e-12);
        }
        assert!(is_abs_sym_ppt(&st(&[1.0 / 6.0; 6]), 3, CheckMode::Full).unwrap().holds);
        assert!(is_abs_sym_ppt(&st(&[1.0 / 6.0; 6]), 3, CheckMode::Fastpath).unwrap().holds);
    }

    #[test]
    fn abs_ppt_errors_and_modes() {
        let u10 = st(&[0.1; 10]);
        assert!(matches!(is_abs_sym_ppt(&u10, 4, CheckMode::Full), Err(Error::EnumerationTooLarge { .. })));
        assert!(is_abs_sym_ppt(&st(&[0.5, 0.5]), 2, CheckMode::Full).is_err());
        let v = is_abs_sym_ppt(&u10, 4, CheckMode::Fastpath).unwrap();
        assert!(v.holds && v.mode == CheckMode::Conjectural);
        assert!(is_abs_sym_ppt(&st(&[1.0 / 6.0; 6]), 3, CheckMode::Conjectural).is_err());
        assert!(is_abs_sym_ppt(&Spectrum::witness(vec![1.0, 0.0, 0.0]), 2, CheckMode::Full).is_err());
        assert!(is_abs_sym_ppt(&st(&[1.0]), 1, CheckMode::Fastpath).unwrap().holds);
    }

    #[test]
    fn closed_form_2d() {
        assert!(is_abs_sym_ppt_2d(0.5, 0.25, 0.25).unwrap());
        assert!(!is_abs_sym_ppt_2d(0.6, 0.2, 0.2).unwrap());
        assert!(is_abs_sym_separable_2d(0.34, 0.33, 0.33).unwrap());
        assert!(matches!(is_abs_sym_ppt_2d(0.2, 0.6, 0.2), Err(Error::Unsorted)));
    }

    #[test]
    fn closed_form_3d() {
        assert!(is_abs_sym_ppt_3d(&[1.0 / 6.0; 6]).unwrap());
        let e = 1e-3;
        assert!(!is_abs_sym_ppt_3d(&[1.0 - 5.0 * e, e, e, e, e, e]).unwrap());
        assert!(is_abs_sym_ppt_3d(&[0.1, 0.3, 0.1, 0.1, 0.2, 0.2]).is_err());
    }

    #[test]
    fn conjectured_4d() {
        assert!(is_abs_sym_ppt_4d_conjectured(&[0.1; 10]).unwrap());
        let mut l = vec![1.0 / 9.0; 9];
        l.push(0.0);
        assert!(!is_abs_sym_ppt_4d_conjectured(&l).unwrap());
    }

    #[test]
    fn full_rank_prefilter() {
        assert!(!full_rank_necessary(&[0.5, 0.5, 0.0]));
        assert!(full_rank_necessary(&[1.0 / 3.0; 3]));
        let mut r = rng::from_seed(8);
        for _ in 0..1000 {
            let d = 2 + (r.random::<u32>() % 2) as usize;
            let m = sym_dim(d);
            let mut l = random_spectrum(m - 1, &mut r);
            l.push(0.0);
            let v = is_abs_sym_ppt(&st(&l), d, CheckMode::Full).unwrap();
            assert!(!v.holds);
        }
    }

    #[test]
    fn spin_flip_properties() {
        let s = SpinFlip.matrix();
        let id = CMatrix::identity(3, 3);
        assert!((&s * &s - &id).max_abs() < 1e-15);
        assert!((&s * s.adjoint() - &id).max_abs() < 1e-15);
        assert!((&s - s.adjoint()).max_abs() < 1e-15);
    }

    fn pure_sym(v: &[C64]) -> SymOperator {
        let v = nalgebra::DVector::from_vec(v.to_vec());
        let full = FullOperator::new(2, &v * v.adjoint()).unwrap();
        compress(&full).unwrap()
    }

    #[test]
    fn concurrence_examples() {
        let o = C64::new(1.0, 0.0);
        let z = C64::new(0.0, 0.0);
        let prod = pure_sym(&[o, z, z, z]);
        assert!(concurrence_2qubit(&prod).unwrap().value.abs() < 1e-8);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let bell = pure_sym(&[o * r, z, z, o * r]);
        let c = concurrence_2qubit(&bell).unwrap();
        assert!((c.value - 1.0).abs() < 1e-8);
        let bad = SymOperator::diagonal(2, &[0.5, 0.5, 0.5]).unwrap();
        assert!(matches!(concurrence_2qubit(&bad), Err(Error::NotAState(_))));
    }

    #[test]
    fn concurrence_vanishes_on_product_mixtures() {
        let mut r = rng::from_seed(12);
        for _ in 0..200 {
            let k = 1 + (r.random::<u32>() % 4) as usize;
            let mut acc = CMatrix::zeros(4, 4);
            let w = random_spectrum(k, &mut r);
            for p in w {
                let v = linalg::random_unit_vector(2, &mut r);
                let vv = tensor_square(&v);
                acc += (&vv * vv.adjoint()).scale(p);
            }
            let rho = compress(&FullOperator::new(2, acc).unwrap()).unwrap();
            let c = concurrence_2qubit(&rho).unwrap();
            assert!(c.value < 1e-7, "{c:?}");
        }
    }

    #[test]
    fn concurrence_range() {
        let mut r = rng::from_seed(13);
        for k in 0..300 {
            let rho = SymOperator::new(2, random_density(3, 1 + k % 3, &mut r)).unwrap();
            let c = concurrence_2qubit(&rho).unwrap();
            assert!((0.0..=1.0 + 1e-12).contains(&c.value));
            assert!(c.nu[0] >= c.nu[1] && c.nu[1] >= c.nu[2] && c.nu[2] >= 0.0);
        }
    }

    #[test]
    fn pairing_examples() {
        let p = min_witness_pairing(&st(&[0.5, 0.3, 0.2]), &Spectrum::witness(vec![1.0, 0.0, -1.0])).unwrap();
        assert!((p + 0.3).abs() < 1e-15);
        let p = pairing_sorted(&[0.5, 0.3, 0.2], &[2.0, 2.0, 2.0]).unwrap();
        assert!((p - 2.0).abs() < 1e-15);
        assert!(pairing_sorted(&[1.0], &[1.0, 2.0]).is_err());
    }

    proptest! {
        #[test]
        fn modes_agree_d2(seed in any::<u64>()) {
            let mut r = rng::from_seed(seed);
            let l = random_spectrum(3, &mut r);
            let full = is_abs_sym_ppt(&st(&l), 2, CheckMode::Full).unwrap();
            let red = is_abs_sym_ppt(&st(&l), 2, CheckMode::Reduced).unwrap();
            let cf = is_abs_sym_ppt_2d(l[0], l[1], l[2]).unwrap();
            if !full.marginal {
                prop_assert_eq!(full.holds, red.holds);
                prop_assert_eq!(full.holds, cf);
            }
        }
    }
}
