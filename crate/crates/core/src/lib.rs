//! Spectral tests for absolute symmetric PPT of bosonic states, symmetric
//! entanglement witnesses, and semidefinite checks on witness spectra.
//!
//! Conventions: `e_a ⊗ e_b` has index `a*d + b`; the symmetric subspace uses
//! the orthonormal basis `e_i⊗e_i`, `(e_i⊗e_j + e_j⊗e_i)/√2` (`i < j`) in
//! lexicographic order; spectra are sorted non-increasing.

pub mod abssep;
pub mod error;
pub mod io;
pub mod linalg;
pub mod matricize;
pub mod oracle;
pub mod rng;
pub mod sdp;
pub mod symspace;
pub mod witness;

pub use abssep::{AbsPptVerdict, CheckMode, Spectrum, SpectrumKind};
pub use error::{Error, Result};
pub use io::DenseJson;
pub use linalg::{CMatrix, CVector, PsdCheck, RMatrix, C64};
pub use matricize::Assignment;
pub use sdp::{ConicProblem, ConicResult, ConicStatus, SolverSettings, SpectrumCheck};
pub use symspace::{FullOperator, SymOperator, SymVector};
pub use witness::{Provenance, WitnessCandidate};

/// Library version, recorded in CLI run records.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
