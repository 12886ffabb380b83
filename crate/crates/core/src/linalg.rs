//! Small dense linear-algebra helpers shared by the modules.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::Rng;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type RMatrix = DMatrix<f64>;
pub type CVector = DVector<C64>;

/// Relative tolerance of the shared PSD test.
pub const PSD_REL_TOL: f64 = 1e-9;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Largest absolute entry.
pub fn max_abs<T: nalgebra::ComplexField<RealField = f64>>(m: &DMatrix<T>) -> f64 {
    m.iter().map(|z| z.clone().abs()).fold(0.0, f64::max)
}

/// `max |entry|` for real and complex matrices alike.
pub trait MaxAbs {
    fn max_abs(&self) -> f64;
}

impl<T, R, C, S> MaxAbs for nalgebra::Matrix<T, R, C, S>
where
    T: nalgebra::ComplexField<RealField = f64>,
    R: nalgebra::Dim,
    C: nalgebra::Dim,
    S: nalgebra::RawStorage<T, R, C>,
{
    fn max_abs(&self) -> f64 {
        self.iter().map(|z| z.clone().abs()).fold(0.0, f64::max)
    }
}

pub fn ensure_square<T>(m: &DMatrix<T>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    Ok(m.nrows())
}

/// Max |A - A*|.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Hermitian check at relative tolerance `1e-12 * max(1, max|A|)`.
pub fn is_hermitian(m: &CMatrix) -> bool {
    m.nrows() == m.ncols() && hermitian_deviation(m) <= 1e-12 * max_abs(m).max(1.0)
}

pub(crate) fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigenvalues of a Hermitian matrix, sorted non-increasing.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// Eigen-decomposition of a Hermitian matrix, sorted non-increasing.
pub fn hermitian_eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let se = SymmetricEigen::new(m.clone());
    let mut idx: Vec<usize> = (0..se.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| se.eigenvalues[b].total_cmp(&se.eigenvalues[a]));
    let vals = idx.iter().map(|&i| se.eigenvalues[i]).collect();
    let vecs = CMatrix::from_fn(m.nrows(), idx.len(), |r, c| se.eigenvectors[(r, idx[c])]);
    (vals, vecs)
}

/// Eigenvalues of a real symmetric matrix, sorted non-increasing.
pub fn real_sym_eigenvalues(m: &RMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// Smallest eigenvalue and its eigenvector for a real symmetric matrix.
pub fn real_sym_min_eig(m: &RMatrix) -> (f64, Vec<f64>) {
    let se = SymmetricEigen::new(m.clone());
    let (k, &v) = se
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty matrix");
    (v, se.eigenvectors.column(k).iter().copied().collect())
}

/// Outcome of the shared PSD test.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PsdCheck {
    pub is_psd: bool,
    pub min_eigenvalue: f64,
    /// Largest absolute eigenvalue, used to scale the tolerance.
    pub scale: f64,
}

/// PSD iff `min eig >= -tol * max(1, max|eig|)`.
pub fn psd_from_eigenvalues(ev: &[f64], tol: f64) -> PsdCheck {
    let min = ev.iter().copied().fold(f64::INFINITY, f64::min);
    let scale = ev.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    PsdCheck { is_psd: min >= -tol * scale.max(1.0), min_eigenvalue: min, scale }
}

pub fn psd_check_hermitian(m: &CMatrix, tol: f64) -> Result<PsdCheck> {
    ensure_square(m)?;
    let dev = hermitian_deviation(m);
    if dev > 1e-8 * max_abs(m).max(1.0) {
        return Err(Error::NotHermitian(dev));
    }
    Ok(psd_from_eigenvalues(&hermitian_eigenvalues(&hermitian_part(m)), tol))
}

pub fn psd_check_real(m: &RMatrix, tol: f64) -> Result<PsdCheck> {
    ensure_square(m)?;
    let dev = (m - m.transpose()).max_abs();
    if dev > 1e-8 * m.max_abs().max(1.0) {
        return Err(Error::NotHermitian(dev));
    }
    Ok(psd_from_eigenvalues(&real_sym_eigenvalues(&((m + m.transpose()) * 0.5)), tol))
}

pub fn to_complex(m: &RMatrix) -> CMatrix {
    m.map(|x| C64::new(x, 0.0))
}

/// Frobenius inner product `Re Tr(A* B)`.
pub fn inner(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

/// Standard complex Gaussian entry (variance 1/2 per component).
pub fn complex_normal(rng: &mut Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-random `n x n` unitary (QR of a Ginibre matrix with phase fix).
pub fn haar_unitary(n: usize, rng: &mut Rng) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| complex_normal(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for i in 0..n {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// Random density matrix of the given rank (induced measure).
pub fn random_density(n: usize, rank: usize, rng: &mut Rng) -> CMatrix {
    let g = CMatrix::from_fn(n, rank.max(1), |_, _| complex_normal(rng));
    let rho = &g * g.adjoint();
    let tr = rho.trace().re;
    rho.unscale(tr)
}

/// Random unit vector in `C^n`.
pub fn random_unit_vector(n: usize, rng: &mut Rng) -> CVector {
    let v = CVector::from_fn(n, |_, _| complex_normal(rng));
    let nrm = v.norm();
    v.unscale(nrm)
}

/// `U diag(values) U*`.
pub fn conjugate_diag(u: &CMatrix, values: &[f64]) -> CMatrix {
    let mut ud = u.clone();
    for (j, &v) in values.iter().enumerate() {
        ud.column_mut(j).scale_mut(v);
    }
    &ud * u.adjoint()
}
