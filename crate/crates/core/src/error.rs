use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("local dimension must be at least 2, got {0}")]
    InvalidDimension(usize),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("operator is not supported on the symmetric subspace (leakage {0:.3e})")]
    NotSymmetricSupported(f64),

    #[error("vector is not real and symmetric (deviation {0:.3e})")]
    NotRealSymmetric(f64),

    #[error("values must be sorted in non-increasing order")]
    Unsorted,

    #[error("not a density spectrum: {0}")]
    NotAState(String),

    #[error("invalid assignment: {0}")]
    InvalidAssignment(String),

    #[error("full enumeration of {count} assignments is too large; use the reduced set")]
    EnumerationTooLarge { count: String },

    #[error("operation supports local dimension {supported}, got {got}")]
    UnsupportedDimension { supported: &'static str, got: usize },

    #[error("spectrum is not achievable by this construction: {0}")]
    NotAchievable(String),

    #[error("malformed conic problem: {0}")]
    MalformedProblem(String),

    #[error("solver inconclusive: {0}")]
    Inconclusive(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("serialization: {0}")]
    Serde(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}
