//! Standard-form block SDP handed to a [`ConicBackend`](super::ConicBackend).
//!
//! ```text
//! minimize   <C, X> + c_fᵀ u
//! subject to <A_i, X> + (B u)_i = b_i,   X = diag(X_1, …, X_K) ⪰ 0,  u free
//! ```
//! Dual: `maximize bᵀy` subject to `Z = C - Σ y_i A_i ⪰ 0`, `Bᵀy = c_f`.

use nalgebra::DVector;

use crate::linalg::RMatrix;

/// Cone of one block of `X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cone {
    /// `n × n` real symmetric PSD matrices.
    Psd(usize),
    /// Non-negative orthant of dimension `n` (a diagonal block).
    Nonneg(usize),
}

impl Cone {
    pub fn size(&self) -> usize {
        match *self {
            Cone::Psd(n) | Cone::Nonneg(n) => n,
        }
    }
}

/// One coefficient of a symmetric data matrix: `v` at `(r, c)` and `(c, r)`.
/// For [`Cone::Nonneg`] blocks `r == c` is the coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entry {
    pub block: usize,
    pub r: usize,
    pub c: usize,
    pub v: f64,
}

impl Entry {
    pub fn new(block: usize, r: usize, c: usize, v: f64) -> Self {
        let (r, c) = if r <= c { (r, c) } else { (c, r) };
        Self { block, r, c, v }
    }
}

#[derive(Debug, Clone, Default)]
pub struct StandardForm {
    pub cones: Vec<Cone>,
    pub c: Vec<Entry>,
    pub a: Vec<Vec<Entry>>,
    pub b: Vec<f64>,
    /// Column `k` of `B` as `(row, coefficient)` pairs.
    pub free: Vec<Vec<(usize, f64)>>,
    pub c_free: Vec<f64>,
}

/// Value of one block.
#[derive(Debug, Clone, PartialEq)]
pub enum Blk {
    Dense(RMatrix),
    Diag(DVector<f64>),
}

impl Blk {
    pub fn zeros(cone: Cone) -> Self {
        match cone {
            Cone::Psd(n) => Blk::Dense(RMatrix::zeros(n, n)),
            Cone::Nonneg(n) => Blk::Diag(DVector::zeros(n)),
        }
    }

    pub fn scaled_identity(cone: Cone, s: f64) -> Self {
        match cone {
            Cone::Psd(n) => Blk::Dense(RMatrix::identity(n, n) * s),
            Cone::Nonneg(n) => Blk::Diag(DVector::from_element(n, s)),
        }
    }

    pub fn inner(&self, o: &Blk) -> f64 {
        match (self, o) {
            (Blk::Dense(a), Blk::Dense(b)) => a.dot(b),
            (Blk::Diag(a), Blk::Diag(b)) => a.dot(b),
            _ => panic!("block kind mismatch"),
        }
    }

    pub fn axpy(&mut self, s: f64, o: &Blk) {
        match (self, o) {
            (Blk::Dense(a), Blk::Dense(b)) => *a += b * s,
            (Blk::Diag(a), Blk::Diag(b)) => a.axpy(s, b, 1.0),
            _ => panic!("block kind mismatch"),
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.inner(self)
    }

    /// `Tr(A Q)` for the symmetric entry `e`; `Q` need not be symmetric.
    pub fn entry_dot(&self, e: &Entry) -> f64 {
        match self {
            Blk::Dense(q) if e.r != e.c => e.v * (q[(e.r, e.c)] + q[(e.c, e.r)]),
            Blk::Dense(q) => e.v * q[(e.r, e.r)],
            Blk::Diag(q) => e.v * q[e.r],
        }
    }

    pub fn add_entry(&mut self, e: &Entry, s: f64) {
        match self {
            Blk::Dense(q) => {
                q[(e.r, e.c)] += s * e.v;
                if e.r != e.c {
                    q[(e.c, e.r)] += s * e.v;
                }
            }
            Blk::Diag(q) => q[e.r] += s * e.v,
        }
    }
}

impl StandardForm {
    pub fn n_rows(&self) -> usize {
        self.b.len()
    }

    /// `A(X)`.
    pub fn apply_a(&self, x: &[Blk]) -> Vec<f64> {
        self.a.iter().map(|row| row.iter().map(|e| x[e.block].entry_dot(e)).sum()).collect()
    }

    /// `Σ y_i A_i`.
    pub fn apply_at(&self, y: &[f64]) -> Vec<Blk> {
        let mut out: Vec<Blk> = self.cones.iter().map(|&c| Blk::zeros(c)).collect();
        for (row, &yi) in self.a.iter().zip(y) {
            if yi != 0.0 {
                for e in row {
                    out[e.block].add_entry(e, yi);
                }
            }
        }
        out
    }

    pub fn c_blocks(&self) -> Vec<Blk> {
        let mut out: Vec<Blk> = self.cones.iter().map(|&c| Blk::zeros(c)).collect();
        for e in &self.c {
            out[e.block].add_entry(e, 1.0);
        }
        out
    }

    /// `B u`.
    pub fn apply_b(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_rows()];
        for (col, &uk) in self.free.iter().zip(u) {
            for &(i, v) in col {
                out[i] += v * uk;
            }
        }
        out
    }

    /// `Bᵀ y`.
    pub fn apply_bt(&self, y: &[f64]) -> Vec<f64> {
        self.free.iter().map(|col| col.iter().map(|&(i, v)| v * y[i]).sum()).collect()
    }
}
