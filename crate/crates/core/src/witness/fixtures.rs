//! Reference operators and vectors with known spectral behaviour.

use crate::io::DenseJson;
use crate::linalg::{RMatrix, C64};
use crate::symspace::{FullOperator, SymVector};

/// File stems of the exported JSON files in `data/`.
pub const FIXTURE_NAMES: [&str; 4] = ["example_non_decomposable_w", "d3_complex_sym", "d3_real_full", "max_neg_x_d4"];

/// A fixture in the dense JSON format, by file stem.
pub fn fixture_json(name: &str) -> Option<DenseJson> {
    Some(match name {
        "example_non_decomposable_w" => DenseJson::from_matrix(2, example_non_decomposable_w().matrix()),
        "d3_complex_sym" => DenseJson::from_vector(3, d3_complex_sym_vector().coords().as_slice()),
        "d3_real_full" => DenseJson::from_vector(3, d3_real_full_vector().coords().as_slice()),
        "max_neg_x_d4" => DenseJson::from_matrix(4, max_neg_x_d4().matrix()),
        _ => return None,
    })
}

/// Two-qubit symmetric witness that is not decomposable; spectrum `{2, 2, 0, -2}`.
pub fn example_non_decomposable_w() -> FullOperator {
    #[rustfmt::skip]
    let w = RMatrix::from_row_slice(4, 4, &[
        0.0, 0.0, 0.0, -2.0,
        0.0, 1.0, 1.0, 0.0,
        0.0, 1.0, 1.0, 0.0,
        -2.0, 0.0, 0.0, 0.0,
    ]);
    FullOperator::from_real(2, &w).expect("4x4")
}

/// `(0, 1, i, 1, 0, i, i, i, 1)`: symmetric, complex; its witness has three eigenvalues `-1`.
pub fn d3_complex_sym_vector() -> SymVector {
    let (o, z, i) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 1.0));
    SymVector::new(3, vec![z, o, i, o, z, i, i, i, o]).expect("length 9")
}

/// `(0, 0, 1, 1, 0, 0, 0, 1, 0)`: real, not symmetric; its witness has three eigenvalues `-1/2`.
pub fn d3_real_full_vector() -> SymVector {
    SymVector::from_real(3, &[0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]).expect("length 9")
}

/// PSD `X = P∨ X P∨` on `C^4 ⊗ C^4` for which `P∨ X^Γ P∨` has six negative eigenvalues.
pub fn max_neg_x_d4() -> FullOperator {
    #[rustfmt::skip]
    let rows: [[i8; 16]; 16] = [
        [ 3, 0,-1, 0, 0,-2, 0,-1,-1, 0, 0, 0, 0,-1, 0, 0],
        [ 0, 7, 0, 0, 7, 0, 1, 0, 0, 1, 0, 3, 0, 0, 3, 0],
        [-1, 0, 7, 0, 0, 5, 0, 0, 7, 0, 1, 0, 0, 0, 0,-1],
        [ 0, 0, 0, 9, 0, 0, 6, 0, 0, 6, 0, 0, 9, 0, 0, 0],
        [ 0, 7, 0, 0, 7, 0, 1, 0, 0, 1, 0, 3, 0, 0, 3, 0],
        [-2, 0, 5, 0, 0, 6, 0, 1, 5, 0, 0, 0, 0, 1, 0, 0],
        [ 0, 1, 0, 6, 1, 0, 7, 0, 0, 7, 0, 1, 6, 0, 1, 0],
        [-1, 0, 0, 0, 0, 1, 0, 7, 0, 0, 5, 0, 0, 7, 0,-1],
        [-1, 0, 7, 0, 0, 5, 0, 0, 7, 0, 1, 0, 0, 0, 0,-1],
        [ 0, 1, 0, 6, 1, 0, 7, 0, 0, 7, 0, 1, 6, 0, 1, 0],
        [ 0, 0, 1, 0, 0, 0, 0, 5, 1, 0, 6, 0, 0, 5, 0,-2],
        [ 0, 3, 0, 0, 3, 0, 1, 0, 0, 1, 0, 7, 0, 0, 7, 0],
        [ 0, 0, 0, 9, 0, 0, 6, 0, 0, 6, 0, 0, 9, 0, 0, 0],
        [-1, 0, 0, 0, 0, 1, 0, 7, 0, 0, 5, 0, 0, 7, 0,-1],
        [ 0, 3, 0, 0, 3, 0, 1, 0, 0, 1, 0, 7, 0, 0, 7, 0],
        [ 0, 0,-1, 0, 0, 0, 0,-1,-1, 0,-2, 0, 0,-1, 0, 3],
    ];
    let m = RMatrix::from_fn(16, 16, |i, j| rows[i][j] as f64);
    FullOperator::from_real(4, &m).expect("16x16")
}
