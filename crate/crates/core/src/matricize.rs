//! Upper-triangular and symmetric matricizations of spectra, their adjoints,
//! the `p↑`/`p↓` partial-sum maps, and the assignment sets `L_k`.

use std::collections::HashSet;
use std::sync::OnceLock;

use itertools::Itertools;
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::MaxAbs;
use crate::linalg::RMatrix;
use crate::rng::{self, Rng};
use crate::symspace::{pair_index, sym_dim, sym_pairs};

/// Bijection from the pairs `(i, j)`, `i <= j`, onto `{0, …, m-1}`.
///
/// `targets[k]` is the spectrum index placed at the `k`-th canonical pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "AssignmentJson", into = "AssignmentJson")]
pub struct Assignment {
    d: usize,
    targets: Vec<usize>,
}

/// On-disk form: `{"d": 2, "pairs": [[1, 1, 3], [1, 2, 1], [2, 2, 2]]}` (1-based).
#[derive(Serialize, Deserialize)]
struct AssignmentJson {
    d: usize,
    pairs: Vec<[usize; 3]>,
}

impl TryFrom<AssignmentJson> for Assignment {
    type Error = Error;

    fn try_from(j: AssignmentJson) -> Result<Self> {
        let m = sym_dim(j.d);
        if j.pairs.len() != m {
            return Err(Error::InvalidAssignment(format!("expected {m} pairs, got {}", j.pairs.len())));
        }
        let mut targets = vec![usize::MAX; m];
        for [i, k, t] in j.pairs {
            if i == 0 || k == 0 || t == 0 || i > j.d || k > j.d {
                return Err(Error::InvalidAssignment(format!("entry ({i},{k},{t}) out of range")));
            }
            let idx = pair_index(j.d, i - 1, k - 1);
            if targets[idx] != usize::MAX {
                return Err(Error::InvalidAssignment(format!("pair ({i},{k}) repeated")));
            }
            targets[idx] = t - 1;
        }
        Assignment::new(j.d, targets)
    }
}

impl From<Assignment> for AssignmentJson {
    fn from(a: Assignment) -> Self {
        let pairs = sym_pairs(a.d)
            .into_iter()
            .zip(&a.targets)
            .map(|((i, j), &t)| [i + 1, j + 1, t + 1])
            .collect();
        AssignmentJson { d: a.d, pairs }
    }
}

impl Assignment {
    pub fn new(d: usize, targets: Vec<usize>) -> Result<Self> {
        let m = sym_dim(d);
        if targets.len() != m {
            return Err(Error::InvalidAssignment(format!("expected {m} targets, got {}", targets.len())));
        }
        let mut seen = vec![false; m];
        for &t in &targets {
            if t >= m || seen[t] {
                return Err(Error::InvalidAssignment(format!("targets {targets:?} are not a permutation")));
            }
            seen[t] = true;
        }
        Ok(Self { d, targets })
    }

    /// Build from a symmetric `d × d` table of 1-based spectrum labels.
    pub fn from_label_matrix(d: usize, labels: &[&[usize]]) -> Result<Self> {
        if labels.len() != d || labels.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidAssignment("label table must be d x d".into()));
        }
        let mut targets = Vec::with_capacity(sym_dim(d));
        for (i, j) in sym_pairs(d) {
            if labels[i][j] != labels[j][i] || labels[i][j] == 0 {
                return Err(Error::InvalidAssignment(format!("bad label at ({i},{j})")));
            }
            targets.push(labels[i][j] - 1);
        }
        Self::new(d, targets)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    /// Target index of pair `(i, j)` (0-based, either order).
    pub fn target(&self, i: usize, j: usize) -> usize {
        self.targets[pair_index(self.d, i, j)]
    }

    /// Inverse table: the pair carrying spectrum index `t`.
    pub fn pair_of_target(&self) -> Vec<(usize, usize)> {
        let pairs = sym_pairs(self.d);
        let mut inv = vec![(0, 0); pairs.len()];
        for (k, &t) in self.targets.iter().enumerate() {
            inv[t] = pairs[k];
        }
        inv
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("assignment serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

fn check_len(x: &[f64], a: &Assignment) -> Result<()> {
    let m = sym_dim(a.d);
    if x.len() != m {
        return Err(Error::DimensionMismatch { expected: m, got: x.len() });
    }
    Ok(())
}

/// `U[i][j] = x[f(i,j)]` for `i <= j`, zero below the diagonal.
pub fn upper_tri_matricization(x: &[f64], a: &Assignment) -> Result<RMatrix> {
    check_len(x, a)?;
    let mut u = RMatrix::zeros(a.d, a.d);
    for ((i, j), &t) in sym_pairs(a.d).into_iter().zip(&a.targets) {
        u[(i, j)] = x[t];
    }
    Ok(u)
}

/// `U + Uᵀ`.
pub fn symmetric_matricization(x: &[f64], a: &Assignment) -> Result<RMatrix> {
    check_len(x, a)?;
    Ok(sym_mat_unchecked(x, a))
}

pub(crate) fn sym_mat_unchecked(x: &[f64], a: &Assignment) -> RMatrix {
    let mut s = RMatrix::zeros(a.d, a.d);
    for ((i, j), &t) in sym_pairs(a.d).into_iter().zip(&a.targets) {
        if i == j {
            s[(i, i)] = 2.0 * x[t];
        } else {
            s[(i, j)] = x[t];
            s[(j, i)] = x[t];
        }
    }
    s
}

/// `out[f(i,j)] = Y[i][j]`, so that `<L(x), Y> = 2 <x, L*(Y)>`.
pub fn adjoint_matricization(y: &RMatrix, a: &Assignment) -> Result<Vec<f64>> {
    if y.nrows() != a.d || y.ncols() != a.d {
        return Err(Error::DimensionMismatch { expected: a.d, got: y.nrows() });
    }
    let asym = (y - y.transpose()).max_abs();
    if asym > 1e-12 * y.max_abs().max(1.0) {
        return Err(Error::NotHermitian(asym));
    }
    let mut out = vec![0.0; sym_dim(a.d)];
    for ((i, j), &t) in sym_pairs(a.d).into_iter().zip(&a.targets) {
        out[t] = y[(i, j)];
    }
    Ok(out)
}

/// `p↑(x)_i = x_1 + … + x_{n-i+1}`.
pub fn p_up(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut out = vec![0.0; n];
    let mut acc = 0.0;
    for j in 0..n {
        acc += x[j];
        out[n - 1 - j] = acc;
    }
    out
}

/// `p↓(x)_i = x_i + … + x_n`.
pub fn p_down(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut out = vec![0.0; n];
    let mut acc = 0.0;
    for j in (0..n).rev() {
        acc += x[j];
        out[j] = acc;
    }
    out
}

/// Every assignment, lexicographic in the target table. Refused for `d >= 4`.
pub fn enumerate_assignments(d: usize) -> Result<Vec<Assignment>> {
    if d == 0 {
        return Err(Error::InvalidDimension(d));
    }
    if d >= 4 {
        let m = sym_dim(d);
        return Err(Error::EnumerationTooLarge { count: format!("{m}!") });
    }
    let m = sym_dim(d);
    Ok((0..m).permutations(m).map(|targets| Assignment { d, targets }).collect())
}

/// Descending order of the products `α_i α_j` (canonical pair indices by rank).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrderingSignature(pub Vec<usize>);

impl OrderingSignature {
    /// `None` when two products are numerically tied.
    pub fn from_alpha(alpha: &[f64]) -> Option<Self> {
        let d = alpha.len();
        let prods: Vec<f64> = sym_pairs(d).into_iter().map(|(i, j)| alpha[i] * alpha[j]).collect();
        let scale = prods.iter().fold(0.0f64, |a, p| a.max(p.abs()));
        let mut order: Vec<usize> = (0..prods.len()).collect();
        order.sort_by(|&a, &b| prods[b].total_cmp(&prods[a]).then(a.cmp(&b)));
        let tied = order.windows(2).any(|w| prods[w[0]] - prods[w[1]] <= 1e-12 * scale);
        (!tied).then_some(Self(order))
    }

    /// Product of rank `l` (largest first) is paired with spectrum index `m-1-l`.
    pub fn assignment(&self, d: usize) -> Assignment {
        let m = self.0.len();
        let mut targets = vec![0; m];
        for (rank, &k) in self.0.iter().enumerate() {
            targets[k] = m - 1 - rank;
        }
        Assignment { d, targets }
    }
}

/// Sign-normalized Gaussian `α`: sorted non-increasing, `α_1 >= |α_d|`, `α_d < 0`.
pub fn sample_alpha(d: usize, rng: &mut Rng) -> Vec<f64> {
    loop {
        let mut a: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        a.sort_by(|x, y| y.total_cmp(x));
        if a[0] < a[d - 1].abs() {
            a = a.into_iter().rev().map(|x| -x).collect();
        }
        if a[d - 1] < 0.0 {
            return a;
        }
    }
}

/// Outcome of the ordering census.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedAssignments {
    pub d: usize,
    pub seed: u64,
    /// Accepted (tie-free) samples.
    pub samples: u64,
    /// 1-based index of the sample that produced the last new signature.
    pub last_new_sample: u64,
    pub assignments: Vec<Assignment>,
}

impl ReducedAssignments {
    pub fn count(&self) -> usize {
        self.assignments.len()
    }

    /// No new signature during the final 10% of samples.
    pub fn saturated(&self) -> bool {
        self.last_new_sample * 10 <= self.samples * 9
    }
}

/// Collect the distinct orderings of `{α_i α_j}` over `n_samples` draws.
pub fn reduced_assignments(d: usize, n_samples: u64, seed: u64) -> Result<ReducedAssignments> {
    if !(2..=6).contains(&d) {
        return Err(Error::UnsupportedDimension { supported: "2..=6", got: d });
    }
    let mut r = rng::from_seed(seed);
    let mut seen: HashSet<OrderingSignature> = HashSet::new();
    let mut last_new = 0;
    let mut accepted = 0u64;
    while accepted < n_samples {
        let alpha = sample_alpha(d, &mut r);
        let Some(sig) = OrderingSignature::from_alpha(&alpha) else { continue };
        accepted += 1;
        if seen.insert(sig) {
            last_new = accepted;
        }
    }
    let mut sigs: Vec<_> = seen.into_iter().collect();
    sigs.sort();
    Ok(ReducedAssignments {
        d,
        seed,
        samples: accepted,
        last_new_sample: last_new,
        assignments: sigs.iter().map(|s| s.assignment(d)).collect(),
    })
}

/// Sample budget used by [`reduced_assignments_cached`].
pub const DEFAULT_REDUCED_SAMPLES: u64 = 1_000_000;
/// Seed used by [`reduced_assignments_cached`].
pub const DEFAULT_REDUCED_SEED: u64 = 20_240_601;

/// The single `d = 2` matricization `[[2λ3, λ1], [λ1, 2λ2]]`.
pub fn reduced_assignment_2d() -> Assignment {
    Assignment::from_label_matrix(2, &[&[3, 1], &[1, 2]]).expect("valid table")
}

/// Process-wide cached reduced set for `2 <= d <= 6`. For `d <= 3` the
/// census result is known exactly and returned without sampling.
pub fn reduced_assignments_cached(d: usize) -> Result<&'static [Assignment]> {
    static CACHE: [OnceLock<Vec<Assignment>>; 5] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
    if !(2..=6).contains(&d) {
        return Err(Error::UnsupportedDimension { supported: "2..=6", got: d });
    }
    Ok(CACHE[d - 2].get_or_init(|| match d {
        2 => vec![reduced_assignment_2d()],
        3 => ordering_assignments_3d(),
        _ => {
            reduced_assignments(d, DEFAULT_REDUCED_SAMPLES, DEFAULT_REDUCED_SEED)
                .expect("dimension checked")
                .assignments
        }
    }))
}

/// The single matricization governing `d = 3`:
/// `[[2λ6, λ2, λ1], [λ2, 2λ3, λ4], [λ1, λ4, 2λ5]]`.
pub fn single_assignment_3d() -> Assignment {
    Assignment::from_label_matrix(3, &[&[6, 2, 1], &[2, 3, 4], &[1, 4, 5]]).expect("valid table")
}

/// The four `d = 3` orderings, as label tables.
pub fn ordering_assignments_3d() -> Vec<Assignment> {
    let tables: [[[usize; 3]; 3]; 4] = [
        [[6, 2, 1], [2, 3, 4], [1, 4, 5]],
        [[6, 4, 1], [4, 3, 2], [1, 2, 5]],
        [[6, 5, 1], [5, 3, 2], [1, 2, 4]],
        [[6, 5, 1], [5, 4, 2], [1, 2, 3]],
    ];
    tables
        .iter()
        .map(|t| {
            let rows: Vec<&[usize]> = t.iter().map(|r| r.as_slice()).collect();
            Assignment::from_label_matrix(3, &rows).expect("valid table")
        })
        .collect()
}

/// The four matricizations conjectured to govern `d = 4`.
pub fn conjectured_assignments_4d() -> Vec<Assignment> {
    let tables: [[[usize; 4]; 4]; 4] = [
        [[10, 3, 2, 1], [3, 4, 5, 6], [2, 5, 7, 8], [1, 6, 8, 9]],
        [[10, 3, 2, 1], [3, 4, 5, 7], [2, 5, 6, 8], [1, 7, 8, 9]],
        [[10, 6, 2, 1], [6, 5, 4, 3], [2, 4, 7, 8], [1, 3, 8, 9]],
        [[10, 7, 2, 1], [7, 5, 4, 3], [2, 4, 6, 8], [1, 3, 8, 9]],
    ];
    tables
        .iter()
        .map(|t| {
            let rows: Vec<&[usize]> = t.iter().map(|r| r.as_slice()).collect();
            Assignment::from_label_matrix(4, &rows).expect("valid table")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_small_sets_match_census() {
        for (d, known) in [(2, vec![reduced_assignment_2d()]), (3, ordering_assignments_3d())] {
            let mut census = reduced_assignments(d, 100_000, DEFAULT_REDUCED_SEED).unwrap().assignments;
            let mut known = known;
            census.sort_by(|a, b| a.targets().cmp(b.targets()));
            known.sort_by(|a, b| a.targets().cmp(b.targets()));
            assert_eq!(census, known, "d = {d}");
        }
    }

    fn assignment_d2(t: [usize; 3]) -> Assignment {
        Assignment::new(2, t.to_vec()).unwrap()
    }

    #[test]
    fn upper_tri_examples() {
        let x = [1.0, 3.0, 5.0];
        let u = upper_tri_matricization(&x, &assignment_d2([0, 1, 2])).unwrap();
        assert_eq!(u, RMatrix::from_row_slice(2, 2, &[1.0, 3.0, 0.0, 5.0]));
        let u = upper_tri_matricization(&x, &assignment_d2([0, 2, 1])).unwrap();
        assert_eq!(u, RMatrix::from_row_slice(2, 2, &[1.0, 5.0, 0.0, 3.0]));
        let z = upper_tri_matricization(&[0.0; 3], &assignment_d2([2, 0, 1])).unwrap();
        assert_eq!(z, RMatrix::zeros(2, 2));
        assert!(upper_tri_matricization(&[1.0, 2.0], &assignment_d2([0, 1, 2])).is_err());
    }

    #[test]
    fn symmetric_examples() {
        let s = symmetric_matricization(&[1.0, 3.0, 5.0], &assignment_d2([0, 1, 2])).unwrap();
        assert_eq!(s, RMatrix::from_row_slice(2, 2, &[2.0, 3.0, 3.0, 10.0]));
        let lam: Vec<f64> = (1..=6).map(|k| k as f64 * 1.5 + 0.25).collect();
        let s = symmetric_matricization(&lam, &single_assignment_3d()).unwrap();
        let l = |k: usize| lam[k - 1];
        let expect = RMatrix::from_row_slice(
            3,
            3,
            &[2.0 * l(6), l(2), l(1), l(2), 2.0 * l(3), l(4), l(1), l(4), 2.0 * l(5)],
        );
        assert_eq!(s, expect);
        let c = symmetric_matricization(&[0.7; 6], &single_assignment_3d()).unwrap();
        let jpi = RMatrix::from_element(3, 3, 0.7) + RMatrix::identity(3, 3) * 0.7;
        assert!((c - jpi).max_abs() < 1e-15);
    }

    #[test]
    fn adjoint_example() {
        // L(x1,x2,x3) = [[2x2, x1], [x1, 2x3]]
        let a = Assignment::from_label_matrix(2, &[&[2, 1], &[1, 3]]).unwrap();
        let y = RMatrix::from_row_slice(2, 2, &[11.0, 12.0, 12.0, 22.0]);
        assert_eq!(adjoint_matricization(&y, &a).unwrap(), vec![12.0, 11.0, 22.0]);
        assert_eq!(adjoint_matricization(&RMatrix::zeros(2, 2), &a).unwrap(), vec![0.0; 3]);
        let bad = RMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(adjoint_matricization(&bad, &a).is_err());
    }

    #[test]
    fn partial_sums() {
        assert_eq!(p_up(&[1.0, 2.0, 3.0]), vec![6.0, 3.0, 1.0]);
        assert_eq!(p_down(&[1.0, 2.0, 3.0]), vec![6.0, 5.0, 3.0]);
    }

    #[test]
    fn enumeration_sizes() {
        assert_eq!(enumerate_assignments(1).unwrap().len(), 1);
        assert_eq!(enumerate_assignments(2).unwrap().len(), 6);
        let all3 = enumerate_assignments(3).unwrap();
        assert_eq!(all3.len(), 720);
        assert_eq!(all3.iter().collect::<HashSet<_>>().len(), 720);
        assert!(all3.windows(2).all(|w| w[0].targets < w[1].targets));
        assert!(matches!(enumerate_assignments(4), Err(Error::EnumerationTooLarge { .. })));
    }

    #[test]
    fn reduced_d2_is_single_ordering() {
        let r = reduced_assignments(2, 10_000, 1).unwrap();
        assert_eq!(r.count(), 1);
        // α1² >= α2² >= α1α2  ->  [[2λ3, λ1], [λ1, 2λ2]]
        let expect = Assignment::from_label_matrix(2, &[&[3, 1], &[1, 2]]).unwrap();
        assert_eq!(r.assignments[0], expect);
        assert!(enumerate_assignments(2).unwrap().contains(&r.assignments[0]));
    }

    #[test]
    fn reduced_d3_matches_ordering_four() {
        let r = reduced_assignments(3, 100_000, 2).unwrap();
        assert_eq!(r.count(), 4);
        let got: HashSet<_> = r.assignments.into_iter().collect();
        let want: HashSet<_> = ordering_assignments_3d().into_iter().collect();
        assert_eq!(got, want);
    }

    #[test]
    fn reduced_d4_contains_conjectured_four() {
        let r = reduced_assignments(4, 200_000, 3).unwrap();
        assert_eq!(r.count(), 26);
        for a in conjectured_assignments_4d() {
            assert!(r.assignments.contains(&a), "{a:?}");
        }
    }

    #[test]
    fn reduced_is_deterministic() {
        assert_eq!(reduced_assignments(3, 5000, 9).unwrap(), reduced_assignments(3, 5000, 9).unwrap());
        assert!(reduced_assignments(7, 10, 0).is_err());
        assert!(reduced_assignments(1, 10, 0).is_err());
    }

    #[test]
    fn sampled_alpha_is_normalized() {
        let mut r = rng::from_seed(4);
        for _ in 0..1000 {
            let a = sample_alpha(5, &mut r);
            assert!(a.windows(2).all(|w| w[0] >= w[1]));
            assert!(a[0] >= a[4].abs() && a[4] < 0.0);
        }
    }

    #[test]
    fn ties_are_rejected() {
        assert!(OrderingSignature::from_alpha(&[1.0, 1.0, -0.5]).is_none());
        assert!(OrderingSignature::from_alpha(&[1.3, 0.4, -0.7]).is_some());
    }

    #[test]
    fn json_roundtrip() {
        let a = single_assignment_3d();
        let s = a.to_json();
        assert!(s.contains("\"pairs\":[[1,1,6],[1,2,2],[1,3,1],[2,2,3],[2,3,4],[3,3,5]]"), "{s}");
        assert_eq!(Assignment::from_json(&s).unwrap(), a);
        assert!(Assignment::from_json(r#"{"d":2,"pairs":[[1,1,1],[1,2,1],[2,2,2]]}"#).is_err());
    }

    proptest! {
        #[test]
        fn sym_is_upper_plus_transpose(x in proptest::collection::vec(-5.0f64..5.0, 6), k in 0usize..720) {
            let a = &enumerate_assignments(3).unwrap()[k];
            let u = upper_tri_matricization(&x, a).unwrap();
            prop_assert_eq!(symmetric_matricization(&x, a).unwrap(), &u + u.transpose());
        }

        #[test]
        fn adjoint_identity(x in proptest::collection::vec(-5.0f64..5.0, 6),
                            g in proptest::collection::vec(-5.0f64..5.0, 9), k in 0usize..720) {
            let a = &enumerate_assignments(3).unwrap()[k];
            let g = RMatrix::from_row_slice(3, 3, &g);
            let y = &g + g.transpose();
            let lhs = symmetric_matricization(&x, a).unwrap().dot(&y);
            let ls = adjoint_matricization(&y, a).unwrap();
            let rhs: f64 = 2.0 * x.iter().zip(&ls).map(|(p, q)| p * q).sum::<f64>();
            prop_assert!((lhs - rhs).abs() < 1e-10);
        }

        #[test]
        fn p_maps_linear_and_mirrored(x in proptest::collection::vec(-5.0f64..5.0, 1..10), c in -3.0f64..3.0) {
            let rev: Vec<f64> = x.iter().rev().copied().collect();
            let a = p_up(&x);
            let b: Vec<f64> = p_down(&rev).into_iter().collect();
            for (p, q) in a.iter().zip(&b) { prop_assert!((p - q).abs() < 1e-12); }
            let y: Vec<f64> = x.iter().map(|v| v * 0.5 - 1.0).collect();
            let s: Vec<f64> = x.iter().zip(&y).map(|(p, q)| c * p + q).collect();
            for ((l, p), q) in p_up(&s).iter().zip(p_up(&x)).zip(p_up(&y)) {
                prop_assert!((l - (c * p + q)).abs() < 1e-10);
            }
            for ((l, p), q) in p_down(&s).iter().zip(p_down(&x)).zip(p_down(&y)) {
                prop_assert!((l - (c * p + q)).abs() < 1e-10);
            }
        }
    }
}
