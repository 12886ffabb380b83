//! Semidefinite feasibility and optimization: a small conic modelling layer,
//! a pluggable backend, and the decomposable-witness programs built on it.

mod ipm;
mod problem;
pub mod programs;
pub mod standard;

pub use ipm::InteriorPoint;
pub use problem::{
    conic_solve, conic_solve_with, BlockKind, BlockSpec, BlockValue, ConicProblem, ConicResult,
    ConicStatus, Constraint, FarkasCertificate, SolverSettings, Term, Var, DEFAULT_MAX_ITER,
    DEFAULT_TOL,
};
pub use programs::*;

use standard::{Blk, StandardForm};

/// Raw output of a backend, before verification.
#[derive(Debug, Clone)]
pub struct BackendSolution {
    pub x: Vec<Blk>,
    pub z: Vec<Blk>,
    pub y: Vec<f64>,
    pub u: Vec<f64>,
    /// The backend met its own stopping criteria.
    pub converged: bool,
    /// `max(primal infeasibility, dual infeasibility, relative gap)` of the
    /// returned iterate.
    pub merit: f64,
    pub iterations: usize,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub message: String,
}

/// A solver for [`StandardForm`] problems. Its output is never trusted
/// directly: [`conic_solve_with`] re-checks feasibility and certificates.
pub trait ConicBackend: Sync {
    fn name(&self) -> &'static str;
    fn solve(&self, sf: &StandardForm, tol: f64, max_iter: usize) -> BackendSolution;
}
