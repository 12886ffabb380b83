//! Linear algebra on `C^d ⊗ C^d` and its symmetric subspace.
//!
//! Product basis vector `e_a ⊗ e_b` has index `a*d + b` (0-based). The
//! symmetric subspace uses the orthonormal basis `e_i⊗e_i` and
//! `(e_i⊗e_j + e_j⊗e_i)/√2` (`i < j`), ordered lexicographically by `(i, j)`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::MaxAbs;
use crate::linalg::{self, CMatrix, CVector, RMatrix, C64, ONE, ZERO};
use crate::rng;

/// Dimension `d(d+1)/2` of the symmetric subspace.
pub fn sym_dim(d: usize) -> usize {
    d * (d + 1) / 2
}

/// Canonical pair order `(i, j)`, `i <= j`, lexicographic, 0-based.
pub fn sym_pairs(d: usize) -> Vec<(usize, usize)> {
    (0..d).flat_map(|i| (i..d).map(move |j| (i, j))).collect()
}

/// Position of pair `(i, j)` (either order) in [`sym_pairs`].
pub fn pair_index(d: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * d + j - i * (i + 1) / 2
}

/// Operator on `C^d ⊗ C^d` stored as a `d² × d²` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FullOperator {
    d: usize,
    mat: CMatrix,
}

impl FullOperator {
    pub fn new(d: usize, mat: CMatrix) -> Result<Self> {
        linalg::ensure_square(&mat)?;
        if mat.nrows() != d * d {
            return Err(Error::DimensionMismatch { expected: d * d, got: mat.nrows() });
        }
        Ok(Self { d, mat })
    }

    pub fn from_real(d: usize, mat: &RMatrix) -> Result<Self> {
        Self::new(d, linalg::to_complex(mat))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn is_hermitian(&self) -> bool {
        linalg::is_hermitian(&self.mat)
    }

    /// `max|P∨ A P∨ - A|` relative to `max|A|`.
    pub fn sym_leakage(&self) -> f64 {
        let p = projector_sym(self.d);
        let pap = &p.mat * &self.mat * &p.mat;
        linalg::max_abs(&(pap - &self.mat)) / linalg::max_abs(&self.mat).max(f64::MIN_POSITIVE)
    }

    pub fn is_symmetric_supported(&self) -> bool {
        self.sym_leakage() <= 1e-10
    }

    /// Eigenvalues, non-increasing. Requires a Hermitian operator.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let dev = linalg::hermitian_deviation(&self.mat);
        if dev > 1e-10 * linalg::max_abs(&self.mat).max(1.0) {
            return Err(Error::NotHermitian(dev));
        }
        Ok(linalg::hermitian_eigenvalues(&linalg::hermitian_part(&self.mat)))
    }
}

/// Operator on the symmetric subspace in the canonical basis (`m × m`).
#[derive(Debug, Clone, PartialEq)]
pub struct SymOperator {
    d: usize,
    mat: CMatrix,
}

impl SymOperator {
    pub fn new(d: usize, mat: CMatrix) -> Result<Self> {
        linalg::ensure_square(&mat)?;
        if mat.nrows() != sym_dim(d) {
            return Err(Error::DimensionMismatch { expected: sym_dim(d), got: mat.nrows() });
        }
        Ok(Self { d, mat })
    }

    pub fn identity(d: usize) -> Self {
        let m = sym_dim(d);
        Self { d, mat: CMatrix::identity(m, m) }
    }

    pub fn diagonal(d: usize, values: &[f64]) -> Result<Self> {
        let m = sym_dim(d);
        if values.len() != m {
            return Err(Error::DimensionMismatch { expected: m, got: values.len() });
        }
        Ok(Self { d, mat: CMatrix::from_fn(m, m, |i, j| if i == j { C64::new(values[i], 0.0) } else { ZERO }) })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn is_hermitian(&self) -> bool {
        linalg::is_hermitian(&self.mat)
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let dev = linalg::hermitian_deviation(&self.mat);
        if dev > 1e-10 * linalg::max_abs(&self.mat).max(1.0) {
            return Err(Error::NotHermitian(dev));
        }
        Ok(linalg::hermitian_eigenvalues(&linalg::hermitian_part(&self.mat)))
    }

    /// `U A U*` for an `m × m` unitary `U`.
    pub fn conjugate(&self, u: &CMatrix) -> Result<Self> {
        if u.nrows() != self.mat.nrows() || u.ncols() != self.mat.ncols() {
            return Err(Error::DimensionMismatch { expected: self.mat.nrows(), got: u.nrows() });
        }
        Ok(Self { d: self.d, mat: u * &self.mat * u.adjoint() })
    }
}

/// Vector in `C^d ⊗ C^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymVector {
    d: usize,
    coords: CVector,
}

impl SymVector {
    pub fn new(d: usize, coords: Vec<C64>) -> Result<Self> {
        if coords.len() != d * d {
            return Err(Error::DimensionMismatch { expected: d * d, got: coords.len() });
        }
        Ok(Self { d, coords: CVector::from_vec(coords) })
    }

    pub fn from_real(d: usize, coords: &[f64]) -> Result<Self> {
        Self::new(d, coords.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn coords(&self) -> &CVector {
        &self.coords
    }

    /// `max|P∨ v - v|`.
    pub fn symmetry_defect(&self) -> f64 {
        let d = self.d;
        let mut dev: f64 = 0.0;
        for a in 0..d {
            for b in 0..d {
                let s = (self.coords[a * d + b] - self.coords[b * d + a]) * 0.5;
                dev = dev.max(s.norm());
            }
        }
        dev
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetry_defect() <= 1e-10
    }

    pub fn max_imag(&self) -> f64 {
        self.coords.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    pub fn is_real(&self) -> bool {
        self.max_imag() <= 1e-12
    }

    pub fn re(&self) -> Self {
        Self { d: self.d, coords: self.coords.map(|z| C64::new(z.re, 0.0)) }
    }

    pub fn im(&self) -> Self {
        Self { d: self.d, coords: self.coords.map(|z| C64::new(z.im, 0.0)) }
    }

    /// Coordinates in the canonical symmetric basis (`V* v`).
    pub fn to_sym_coords(&self) -> CVector {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let d = self.d;
        CVector::from_iterator(
            sym_dim(d),
            sym_pairs(d).into_iter().map(|(i, j)| {
                if i == j {
                    self.coords[i * d + i]
                } else {
                    (self.coords[i * d + j] + self.coords[j * d + i]) * r
                }
            }),
        )
    }

    /// Inverse of [`SymVector::to_sym_coords`].
    pub fn from_sym_coords(d: usize, w: &CVector) -> Result<Self> {
        if w.len() != sym_dim(d) {
            return Err(Error::DimensionMismatch { expected: sym_dim(d), got: w.len() });
        }
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut v = vec![ZERO; d * d];
        for (k, (i, j)) in sym_pairs(d).into_iter().enumerate() {
            if i == j {
                v[i * d + i] = w[k];
            } else {
                v[i * d + j] = w[k] * r;
                v[j * d + i] = w[k] * r;
            }
        }
        Self::new(d, v)
    }
}

/// Real spectral decomposition `v = Σ α_j w_j ⊗ w_j` of a real symmetric vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealSymSpectralDecomp {
    pub alpha: Vec<f64>,
    /// Columns are the `w_j`.
    pub basis: RMatrix,
}

impl RealSymSpectralDecomp {
    pub fn reconstruct(&self) -> Vec<f64> {
        let d = self.alpha.len();
        let mut v = vec![0.0; d * d];
        for (j, &a) in self.alpha.iter().enumerate() {
            let w = self.basis.column(j);
            for p in 0..d {
                for q in 0..d {
                    v[p * d + q] += a * w[p] * w[q];
                }
            }
        }
        v
    }
}

/// The `d² × m` isometry whose columns are the canonical symmetric basis.
pub fn sym_isometry(d: usize) -> RMatrix {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = RMatrix::zeros(d * d, sym_dim(d));
    for (k, (i, j)) in sym_pairs(d).into_iter().enumerate() {
        if i == j {
            v[(i * d + i, k)] = 1.0;
        } else {
            v[(i * d + j, k)] = r;
            v[(j * d + i, k)] = r;
        }
    }
    v
}

/// Projector onto the symmetric subspace.
pub fn projector_sym(d: usize) -> FullOperator {
    let n = d * d;
    let mut p = CMatrix::zeros(n, n);
    for a in 0..d {
        for b in 0..d {
            p[(a * d + b, a * d + b)] += C64::new(0.5, 0.0);
            p[(b * d + a, a * d + b)] += C64::new(0.5, 0.0);
        }
    }
    FullOperator { d, mat: p }
}

/// `V A V*`.
pub fn embed(a: &SymOperator) -> FullOperator {
    let v = linalg::to_complex(&sym_isometry(a.d));
    FullOperator { d: a.d, mat: &v * &a.mat * v.transpose() }
}

/// `V* A V`. The operator must live on the symmetric subspace.
pub fn compress(a: &FullOperator) -> Result<SymOperator> {
    let leak = a.sym_leakage();
    if leak > 1e-10 {
        return Err(Error::NotSymmetricSupported(leak));
    }
    Ok(compress_unchecked(a))
}

/// `V* A V` without the support check (the symmetric block of `A`).
pub fn compress_unchecked(a: &FullOperator) -> SymOperator {
    let v = linalg::to_complex(&sym_isometry(a.d));
    SymOperator { d: a.d, mat: v.transpose() * &a.mat * &v }
}

/// Transpose on the second tensor factor of a `d² × d²` matrix.
pub fn partial_transpose_matrix(d: usize, a: &CMatrix) -> Result<CMatrix> {
    linalg::ensure_square(a)?;
    if a.nrows() != d * d {
        return Err(Error::DimensionMismatch { expected: d * d, got: a.nrows() });
    }
    Ok(pt_raw(d, a))
}

fn pt_raw(d: usize, a: &CMatrix) -> CMatrix {
    let n = d * d;
    let mut out = CMatrix::zeros(n, n);
    for ai in 0..d {
        for bi in 0..d {
            for mi in 0..d {
                for ni in 0..d {
                    out[(ai * d + bi, mi * d + ni)] = a[(ai * d + ni, mi * d + bi)];
                }
            }
        }
    }
    out
}

/// `A^Γ`.
pub fn partial_transpose(a: &FullOperator) -> FullOperator {
    FullOperator { d: a.d, mat: pt_raw(a.d, &a.mat) }
}

/// `P∨ A^Γ P∨`.
pub fn sym_conjugated_pt(a: &FullOperator) -> FullOperator {
    let p = projector_sym(a.d);
    FullOperator { d: a.d, mat: &p.mat * pt_raw(a.d, &a.mat) * &p.mat }
}

/// `V* A^Γ V`, the compressed form of [`sym_conjugated_pt`].
pub fn sym_pt_compressed(a: &FullOperator) -> SymOperator {
    let v = linalg::to_complex(&sym_isometry(a.d));
    SymOperator { d: a.d, mat: v.transpose() * pt_raw(a.d, &a.mat) * &v }
}

/// `mat(v)[i][j] = v[i*d + j]`.
pub fn matricize_vec(v: &SymVector) -> CMatrix {
    let d = v.d;
    CMatrix::from_fn(d, d, |i, j| v.coords[i * d + j])
}

/// Inverse of [`matricize_vec`].
pub fn vectorize(m: &CMatrix) -> Result<SymVector> {
    let d = linalg::ensure_square(m)?;
    SymVector::new(d, (0..d * d).map(|k| m[(k / d, k % d)]).collect())
}

/// Spectral decomposition of `mat(v)` for real symmetric `v`.
pub fn real_sym_vector_spectral(v: &SymVector) -> Result<RealSymSpectralDecomp> {
    let defect = v.symmetry_defect().max(v.max_imag());
    if defect > 1e-10 * v.coords.max_abs().max(1.0) {
        return Err(Error::NotRealSymmetric(defect));
    }
    let d = v.d;
    let m = RMatrix::from_fn(d, d, |i, j| 0.5 * (v.coords[i * d + j].re + v.coords[j * d + i].re));
    let se = nalgebra::SymmetricEigen::new(m);
    Ok(RealSymSpectralDecomp { alpha: se.eigenvalues.iter().copied().collect(), basis: se.eigenvectors })
}

/// `v ⊗ v` for `v ∈ C^d`.
pub fn tensor_square(v: &CVector) -> CVector {
    let d = v.len();
    CVector::from_fn(d * d, |k, _| v[k / d] * v[k % d])
}

/// Haar-random unitary on the symmetric subspace, deterministic per seed.
pub fn random_sym_unitary(d: usize, seed: u64) -> CMatrix {
    linalg::haar_unitary(sym_dim(d), &mut rng::from_seed(seed))
}

/// Identity on `C^d ⊗ C^d`.
pub fn identity_full(d: usize) -> FullOperator {
    FullOperator { d, mat: DMatrix::from_fn(d * d, d * d, |i, j| if i == j { ONE } else { ZERO }) }
}
