//! Symmetric entanglement witnesses: extreme rays `P∨(vv*)^Γ P∨`, their
//! spectra, negative-eigenvalue bounds, two-qubit constructions, and the
//! subspace of states with non-positive partial transpose.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::abssep::Spectrum;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, MaxAbs, RMatrix, C64, ZERO};
use crate::rng;
use crate::symspace::{
    self, partial_transpose, real_sym_vector_spectral, sym_pairs, tensor_square, FullOperator, SymVector,
};

pub mod fixtures;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Provenance {
    FromVector,
    Constructed2q { mu: [f64; 3] },
    MaxNeg { d: usize, c: f64 },
    Fixture { name: String },
}

/// A Hermitian operator supported on the symmetric subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessCandidate {
    pub w: FullOperator,
    pub provenance: Provenance,
}

impl WitnessCandidate {
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        self.w.eigenvalues()
    }
}

/// `P∨ (v v*)^Γ P∨`.
pub fn witness_from_vector(v: &SymVector) -> WitnessCandidate {
    let c = v.coords();
    let rho = FullOperator::new(v.d(), c * c.adjoint()).expect("d² x d² by construction");
    WitnessCandidate { w: symspace::sym_conjugated_pt(&rho), provenance: Provenance::FromVector }
}

/// `V* (v v*)^Γ V` assembled entry by entry; same nonzero spectrum as
/// [`witness_from_vector`] at `O(m²)` cost.
pub fn sym_witness_compressed(v: &CVector, d: usize) -> CMatrix {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let pairs = sym_pairs(d);
    let comps: Vec<Vec<(usize, usize, f64)>> = pairs
        .iter()
        .map(|&(i, j)| if i == j { vec![(i, i, 1.0)] } else { vec![(i, j, r), (j, i, r)] })
        .collect();
    let m = pairs.len();
    let mut w = CMatrix::zeros(m, m);
    for p in 0..m {
        for q in p..m {
            let mut acc = ZERO;
            for &(a, b, wp) in &comps[p] {
                for &(mm, n, wq) in &comps[q] {
                    // (vv*)^Γ[(a,b),(m,n)] = v[a,n] conj(v[m,b])
                    acc += v[a * d + n] * v[mm * d + b].conj() * (wp * wq);
                }
            }
            w[(p, q)] = acc;
            w[(q, p)] = acc.conj();
        }
    }
    w
}

/// Real/imaginary decomposition of a symmetric vector and the check
/// `W(v) = W(Re v) + W(Im v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSplit {
    pub x: SymVector,
    pub y: SymVector,
    pub identity_error: f64,
    pub max_imag: f64,
}

/// `max|W(v) - W(Re v) - W(Im v)|` and `max|Im W(v)|` for any `v`.
pub fn split_identity_error(v: &SymVector) -> (f64, f64) {
    let w = witness_from_vector(v).w;
    let wx = witness_from_vector(&v.re()).w;
    let wy = witness_from_vector(&v.im()).w;
    let err = (w.matrix() - wx.matrix() - wy.matrix()).max_abs();
    let imag = w.matrix().iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    (err, imag)
}

pub fn real_split(v: &SymVector) -> Result<RealSplit> {
    let defect = v.symmetry_defect();
    if defect > 1e-10 * v.coords().max_abs().max(1.0) {
        return Err(Error::NotRealSymmetric(defect));
    }
    let (identity_error, max_imag) = split_identity_error(v);
    Ok(RealSplit { x: v.re(), y: v.im(), identity_error, max_imag })
}

/// `{α_i α_j : i <= j} ∪ {0 × d(d-1)/2}` for a real symmetric `v`.
pub fn predicted_eigs_real_sym(v: &SymVector) -> Result<Spectrum> {
    let dec = real_sym_vector_spectral(v)?;
    let d = v.d();
    let mut vals: Vec<f64> = sym_pairs(d).into_iter().map(|(i, j)| dec.alpha[i] * dec.alpha[j]).collect();
    vals.extend(std::iter::repeat_n(0.0, d * (d - 1) / 2));
    Ok(Spectrum::witness(vals))
}

/// Eigenvalues below `-tol * max|eigenvalue|`.
pub fn count_negative_eigs(w: &FullOperator, tol: f64) -> Result<usize> {
    Ok(count_below(&w.eigenvalues()?, tol))
}

/// [`count_negative_eigs`] for a Hermitian matrix of any size.
pub fn count_negative_eigs_matrix(w: &CMatrix, tol: f64) -> Result<usize> {
    let dev = linalg::hermitian_deviation(w);
    if dev > 1e-10 * linalg::max_abs(w).max(1.0) {
        return Err(Error::NotHermitian(dev));
    }
    Ok(count_below(&linalg::hermitian_eigenvalues(&linalg::hermitian_part(w)), tol))
}

pub(crate) fn count_below(ev: &[f64], tol: f64) -> usize {
    let scale = ev.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    ev.iter().filter(|&&e| e < -tol * scale).count()
}

/// `(⌊d²/4⌋, d(d-1)/2)`.
pub fn max_neg_bounds(d: usize) -> (usize, usize) {
    (d * d / 4, d * (d.max(1) - 1) / 2)
}

/// Coefficients with `⌊d/2⌋` negative entries, giving `⌊d²/4⌋` negative products.
pub fn max_negative_alpha(d: usize) -> Vec<f64> {
    let neg = d / 2;
    (0..d).map(|j| if j < d - neg { 1.0 + 0.1 * j as f64 } else { -(1.0 + 0.1 * j as f64) }).collect()
}

/// `Σ α_j w_j ⊗ w_j` for the columns `w_j` of `basis`.
pub fn real_sym_vector_from_alpha(alpha: &[f64], basis: &RMatrix) -> Result<SymVector> {
    let d = alpha.len();
    if basis.nrows() != d || basis.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, got: basis.nrows() });
    }
    let mut v = vec![0.0; d * d];
    for (j, &a) in alpha.iter().enumerate() {
        for p in 0..d {
            for q in 0..d {
                v[p * d + q] += a * basis[(p, j)] * basis[(q, j)];
            }
        }
    }
    SymVector::from_real(d, &v)
}

fn check_sorted3(mu: [f64; 3]) -> Result<()> {
    if mu[0] < mu[1] || mu[1] < mu[2] {
        return Err(Error::Unsorted);
    }
    Ok(())
}

/// Two-qubit decomposable witness with spectrum `{μ1, μ2, μ3, 0}`.
///
/// Returns `(X, W)` with `X = μ1 E₀₀ + μ3 (E₀₃ + E₃₀) + μ2 E₃₃ ⪰ 0` and `W = P∨ X^Γ P∨`.
pub fn construct_two_qubit_witness(mu: [f64; 3]) -> Result<(FullOperator, WitnessCandidate)> {
    check_sorted3(mu)?;
    let [m1, m2, m3] = mu;
    let slack = 1e-12 * m1.abs().max(1.0);
    if m2 < -slack {
        return Err(Error::NotAchievable(format!("mu2 = {m2} < 0")));
    }
    if m3 < -(m1 * m2.max(0.0)).sqrt() - slack {
        return Err(Error::NotAchievable(format!("mu3 = {m3} < -sqrt(mu1 mu2)")));
    }
    let mut x = RMatrix::zeros(4, 4);
    x[(0, 0)] = m1;
    x[(3, 3)] = m2;
    x[(0, 3)] = m3;
    x[(3, 0)] = m3;
    let x = FullOperator::from_real(2, &x)?;
    let w = symspace::sym_conjugated_pt(&x);
    Ok((x, WitnessCandidate { w, provenance: Provenance::Constructed2q { mu } }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumClass2q {
    /// Realized by a decomposable witness.
    Achievable,
    /// Not the spectrum of any two-qubit symmetric witness.
    Excluded,
    /// Between the proven and the conjectured boundary.
    ConjecturedExcluded,
}

/// Three-way classification of a candidate two-qubit witness spectrum.
pub fn classify_2q_spectrum(mu: [f64; 3]) -> Result<SpectrumClass2q> {
    check_sorted3(mu)?;
    let [m1, m2, m3] = mu;
    let a = m2 >= 0.0;
    let b = a && m3 >= -(m1 * m2).sqrt();
    let c = if m2 < m1 / 4.0 { m3 >= -m1 / 4.0 - m2 } else { b };
    Ok(if a && b {
        SpectrumClass2q::Achievable
    } else if !a || !c {
        SpectrumClass2q::Excluded
    } else {
        SpectrumClass2q::ConjecturedExcluded
    })
}

/// Result of the sampled product-vector test. Heuristic: a non-negative
/// minimum is evidence, not proof.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SewSampleReport {
    pub min_value: f64,
    /// Minimizing `v ∈ C^d` as `[re, im]` pairs.
    pub minimizer: Vec<[f64; 2]>,
    pub samples: usize,
    pub descent_steps: usize,
    pub heuristic: bool,
}

/// Default number of random product vectors.
pub const SEW_DEFAULT_SAMPLES: usize = 10_000;
const SEW_DESCENT_STEPS: usize = 100;

fn product_form(w: &CMatrix, v: &CVector) -> (f64, CVector) {
    let u = tensor_square(v);
    let wu = w * &u;
    (u.dotc(&wu).re, wu)
}

/// Minimize `(v⊗v)* W (v⊗v)` over random unit `v`, then refine the best
/// sample by projected gradient descent on the sphere.
pub fn check_sew_sampled(w: &FullOperator, n_samples: usize, seed: u64) -> Result<SewSampleReport> {
    let dev = linalg::hermitian_deviation(w.matrix());
    if dev > 1e-10 * w.matrix().max_abs().max(1.0) {
        return Err(Error::NotHermitian(dev));
    }
    let d = w.d();
    let wm = linalg::hermitian_part(w.matrix());
    let mut r = rng::from_seed(seed);
    let mut best = (f64::INFINITY, CVector::zeros(d));
    for _ in 0..n_samples.max(1) {
        let v = linalg::random_unit_vector(d, &mut r);
        let (f, _) = product_form(&wm, &v);
        if f < best.0 {
            best = (f, v);
        }
    }
    let norm = wm.max_abs().max(f64::MIN_POSITIVE);
    let (mut fv, mut v) = best;
    let mut steps = 0;
    for _ in 0..SEW_DESCENT_STEPS {
        let (_, wu) = product_form(&wm, &v);
        // ∂f/∂v̄_c = 2 Σ_b (W u)_{cb} v̄_b for symmetric W u
        let mut g = CVector::from_fn(d, |c, _| (0..d).map(|b| wu[c * d + b] * v[b].conj()).sum::<C64>() * 2.0);
        let radial = v.dotc(&g);
        g -= &v * radial;
        if g.norm() < 1e-14 * norm {
            break;
        }
        let mut eta = 0.5 / norm;
        let mut improved = false;
        for _ in 0..40 {
            let cand = &v - &g * C64::new(eta, 0.0);
            let cand = cand.unscale(cand.norm());
            let (fc, _) = product_form(&wm, &cand);
            if fc < fv {
                v = cand;
                fv = fc;
                improved = true;
                break;
            }
            eta *= 0.5;
        }
        steps += 1;
        if !improved {
            break;
        }
    }
    Ok(SewSampleReport {
        min_value: fv,
        minimizer: v.iter().map(|z| [z.re, z.im]).collect(),
        samples: n_samples.max(1),
        descent_steps: steps,
        heuristic: true,
    })
}

/// Orthonormal basis of the subspace on which every state has an NPT partial transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct NptSubspace {
    pub d: usize,
    pub basis: Vec<SymVector>,
}

impl NptSubspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Orthogonal projector `Σ s s*`.
    pub fn projector(&self) -> FullOperator {
        let n = self.d * self.d;
        let mut p = CMatrix::zeros(n, n);
        for s in &self.basis {
            p += s.coords() * s.coords().adjoint();
        }
        FullOperator::new(self.d, p).expect("d² x d²")
    }
}

/// Sums of `mat(v)` along each diagonal of constant column-minus-row offset,
/// offsets `-(d-1) ..= d-1`.
pub fn forward_diagonal_sums(v: &SymVector) -> Vec<C64> {
    let d = v.d() as isize;
    let m = symspace::matricize_vec(v);
    (-(d - 1)..d)
        .map(|k| (0..d).filter(|&i| (0..d).contains(&(i + k))).map(|i| m[(i as usize, (i + k) as usize)]).sum())
        .collect()
}

/// Span of `(e_i⊗e_{i+k} - e_{i+1}⊗e_{i+k+1}) + (e_{i+k}⊗e_i - e_{i+k+1}⊗e_{i+1})`, orthonormalized.
pub fn npt_subspace(d: usize) -> Result<NptSubspace> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let idx = |a: usize, b: usize| a * d + b;
    let mut vecs: Vec<Vec<f64>> = Vec::new();
    for k in 0..d - 1 {
        for i in 0..d - 1 - k {
            let mut s = vec![0.0; d * d];
            s[idx(i, i + k)] += 1.0;
            s[idx(i + 1, i + k + 1)] -= 1.0;
            s[idx(i + k, i)] += 1.0;
            s[idx(i + k + 1, i + 1)] -= 1.0;
            vecs.push(s);
        }
    }
    // modified Gram-Schmidt
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for mut v in vecs {
        for b in &basis {
            let c: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n < 1e-10 {
            return Err(Error::InvalidArgument("spanning set is linearly dependent".into()));
        }
        basis.push(v.into_iter().map(|x| x / n).collect());
    }
    let basis = basis.iter().map(|b| SymVector::from_real(d, b)).collect::<Result<Vec<_>>>()?;
    Ok(NptSubspace { d, basis })
}

/// Random state supported on `span(basis)` (rank up to `basis.len()`).
pub fn random_state_on(sub: &NptSubspace, rng: &mut rng::Rng) -> FullOperator {
    let k = sub.dim();
    let rank = 1 + (rng.random::<u32>() as usize % k);
    let coeffs = linalg::random_density(k, rank, rng);
    let n = sub.d * sub.d;
    let b = CMatrix::from_fn(n, k, |r, c| sub.basis[c].coords()[r]);
    FullOperator::new(sub.d, &b * coeffs * b.adjoint()).expect("d² x d²")
}

/// Minimum eigenvalue of `ρ^Γ`.
pub fn min_pt_eigenvalue(rho: &FullOperator) -> f64 {
    *partial_transpose(rho).eigenvalues().expect("Hermitian input").last().expect("non-empty")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::complex_normal;
    use crate::symspace::sym_dim;
    use proptest::prelude::*;

    fn rand_real_sym(d: usize, seed: u64) -> SymVector {
        let mut r = rng::from_seed(seed);
        let g = RMatrix::from_fn(d, d, |_, _| complex_normal(&mut r).re);
        let s = &g + g.transpose();
        SymVector::from_real(d, s.as_slice()).unwrap()
    }

    fn rand_sym(d: usize, seed: u64) -> SymVector {
        let mut r = rng::from_seed(seed);
        let w = CVector::from_fn(sym_dim(d), |_, _| complex_normal(&mut r));
        SymVector::from_sym_coords(d, &w).unwrap()
    }

    fn assert_spectrum(got: &[f64], want: &[f64], tol: f64) {
        assert_eq!(got.len(), want.len());
        let mut w = want.to_vec();
        w.sort_by(|a, b| b.total_cmp(a));
        for (g, w) in got.iter().zip(&w) {
            assert!((g - w).abs() < tol, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn vector_witness_examples() {
        let v = SymVector::from_real(2, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        let w = witness_from_vector(&v);
        assert_spectrum(&w.eigenvalues().unwrap(), &[1.0, 0.0, 0.0, 0.0], 1e-14);
        let ev = witness_from_vector(&fixtures::d3_complex_sym_vector()).eigenvalues().unwrap();
        assert_spectrum(&ev, &[3.0, 3.0, 1.0, 0.0, 0.0, 0.0, -1.0, -1.0, -1.0], 1e-12);
        let ev = witness_from_vector(&fixtures::d3_real_full_vector()).eigenvalues().unwrap();
        assert_eq!(ev.iter().filter(|e| (**e + 0.5).abs() < 1e-8).count(), 3);
    }

    #[test]
    fn compressed_matches_full() {
        for d in 2..5 {
            let mut r = rng::from_seed(d as u64);
            let v = CVector::from_fn(d * d, |_, _| complex_normal(&mut r));
            let sv = SymVector::new(d, v.iter().copied().collect()).unwrap();
            let full = symspace::compress_unchecked(&witness_from_vector(&sv).w);
            assert!((full.matrix() - sym_witness_compressed(&v, d)).max_abs() < 1e-12);
        }
    }

    #[test]
    fn split_examples() {
        let s = real_split(&rand_real_sym(3, 1)).unwrap();
        assert!(s.y.coords().max_abs() == 0.0 && s.identity_error < 1e-12);
        let s = real_split(&fixtures::d3_complex_sym_vector()).unwrap();
        assert!(s.identity_error < 1e-10 && s.max_imag < 1e-10);
        assert!(real_split(&fixtures::d3_real_full_vector()).is_err());
    }

    #[test]
    fn predicted_examples() {
        let v = SymVector::from_real(2, &[1.0, 0.0, 0.0, 1.0]).unwrap();
        assert_spectrum(predicted_eigs_real_sym(&v).unwrap().values(), &[1.0, 1.0, 1.0, 0.0], 1e-14);
        let v = SymVector::from_real(2, &[1.0, 0.0, 0.0, -1.0]).unwrap();
        assert_spectrum(predicted_eigs_real_sym(&v).unwrap().values(), &[1.0, 1.0, -1.0, 0.0], 1e-14);
    }

    #[test]
    fn negative_counts_on_fixtures() {
        let w = fixtures::example_non_decomposable_w();
        assert_eq!(count_negative_eigs(&w, 1e-9).unwrap(), 1);
        let x = fixtures::max_neg_x_d4();
        assert_eq!(count_negative_eigs(&symspace::sym_conjugated_pt(&x), 1e-9).unwrap(), 6);
        assert_eq!(count_negative_eigs(&symspace::projector_sym(3), 1e-9).unwrap(), 0);
    }

    #[test]
    fn bounds() {
        assert_eq!(max_neg_bounds(2), (1, 1));
        assert_eq!(max_neg_bounds(3), (2, 3));
        assert_eq!(max_neg_bounds(10), (25, 45));
    }

    #[test]
    fn alpha_construction_attains_floor() {
        for d in 2..=6 {
            let v = real_sym_vector_from_alpha(&max_negative_alpha(d), &RMatrix::identity(d, d)).unwrap();
            let n = count_negative_eigs(&witness_from_vector(&v).w, 1e-8).unwrap();
            assert_eq!(n, max_neg_bounds(d).0);
        }
    }

    #[test]
    fn two_qubit_construction() {
        let (x, w) = construct_two_qubit_witness([1.0, 1.0, -1.0]).unwrap();
        assert!(linalg::psd_check_hermitian(x.matrix(), 1e-9).unwrap().is_psd);
        assert!(x.is_symmetric_supported());
        assert_spectrum(&w.eigenvalues().unwrap(), &[1.0, 1.0, -1.0, 0.0], 1e-14);
        let (_, w) = construct_two_qubit_witness([1.0, 0.0, 0.0]).unwrap();
        assert_spectrum(&w.eigenvalues().unwrap(), &[1.0, 0.0, 0.0, 0.0], 1e-14);
        assert!(matches!(construct_two_qubit_witness([1.0, 0.1, -0.5]), Err(Error::NotAchievable(_))));
        assert!(matches!(construct_two_qubit_witness([0.1, 1.0, -0.5]), Err(Error::Unsorted)));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_2q_spectrum([1.0, 0.5, -0.7]).unwrap(), SpectrumClass2q::Achievable);
        assert_eq!(classify_2q_spectrum([1.0, -0.1, -5.0]).unwrap(), SpectrumClass2q::Excluded);
        assert_eq!(classify_2q_spectrum([1.0, 0.1, -0.33]).unwrap(), SpectrumClass2q::ConjecturedExcluded);
        assert_eq!(classify_2q_spectrum([1.0, 0.1, -0.36]).unwrap(), SpectrumClass2q::Excluded);
        assert_eq!(classify_2q_spectrum([1.0, 0.5, -0.75]).unwrap(), SpectrumClass2q::Excluded);
    }

    #[test]
    fn sampled_check_examples() {
        let rep = check_sew_sampled(&fixtures::example_non_decomposable_w(), 2000, 1).unwrap();
        assert!(rep.min_value >= -1e-9 && rep.heuristic);
        let minus = FullOperator::new(2, -symspace::projector_sym(2).matrix()).unwrap();
        let rep = check_sew_sampled(&minus, 100, 2).unwrap();
        assert!((rep.min_value + 1.0).abs() < 1e-9);
        for seed in 0..5 {
            let w = witness_from_vector(&rand_sym(3, seed)).w;
            assert!(check_sew_sampled(&w, 500, seed).unwrap().min_value >= -1e-9);
        }
    }

    #[test]
    fn sampled_check_matches_closed_form() {
        // (v⊗v)* W (v⊗v) = 8 (Re v1 Im v2 - Im v1 Re v2)^2
        let w = fixtures::example_non_decomposable_w();
        let mut r = rng::from_seed(3);
        for _ in 0..100 {
            let v = linalg::random_unit_vector(2, &mut r);
            let (f, _) = product_form(w.matrix(), &v);
            let g = v[0].re * v[1].im - v[0].im * v[1].re;
            assert!((f - 8.0 * g * g).abs() < 1e-12);
        }
    }

    #[test]
    fn npt_subspace_shape() {
        let s = npt_subspace(2).unwrap();
        assert_eq!(s.dim(), 1);
        let b = s.basis[0].coords();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((b[0].re.abs() - r).abs() < 1e-14 && (b[0] + b[3]).norm() < 1e-14);
        assert_eq!(npt_subspace(3).unwrap().dim(), 3);
        assert!(npt_subspace(1).is_err());
        for d in 2..=6 {
            let s = npt_subspace(d).unwrap();
            assert_eq!(s.dim(), d * (d - 1) / 2);
            let p = s.projector();
            assert!((p.matrix() * p.matrix() - p.matrix()).max_abs() < 1e-12);
            for v in &s.basis {
                assert!(v.is_symmetric());
                assert!(forward_diagonal_sums(v).iter().all(|z| z.norm() < 1e-12));
            }
        }
    }

    #[test]
    fn npt_states_have_negative_transpose() {
        let mut r = rng::from_seed(77);
        for d in 2..=5 {
            let s = npt_subspace(d).unwrap();
            for _ in 0..40 {
                let rho = random_state_on(&s, &mut r);
                assert!(min_pt_eigenvalue(&rho) < -1e-10);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn predicted_matches_numerical(d in 2usize..7, seed in any::<u64>()) {
            let v = rand_real_sym(d, seed);
            let pred = predicted_eigs_real_sym(&v).unwrap();
            let num = witness_from_vector(&v).eigenvalues().unwrap();
            for (p, n) in pred.values().iter().zip(&num) {
                prop_assert!((p - n).abs() < 1e-8 * (1.0 + n.abs()));
            }
            let cnt = count_negative_eigs(&witness_from_vector(&v).w, 1e-8).unwrap();
            prop_assert!(cnt <= max_neg_bounds(d).0);
        }

        #[test]
        fn vector_witnesses_are_valid(d in 2usize..5, seed in any::<u64>()) {
            let mut r = rng::from_seed(seed);
            let v = SymVector::new(d, (0..d * d).map(|_| complex_normal(&mut r)).collect()).unwrap();
            let w = witness_from_vector(&v).w;
            prop_assert!(w.is_hermitian() && w.is_symmetric_supported());
            prop_assert!(count_negative_eigs(&w, 1e-8).unwrap() <= max_neg_bounds(d).1);
        }

        #[test]
        fn symmetric_vectors_split(d in 2usize..5, seed in any::<u64>()) {
            let s = real_split(&rand_sym(d, seed)).unwrap();
            prop_assert!(s.identity_error < 1e-10 && s.max_imag < 1e-10);
        }
    }
}
