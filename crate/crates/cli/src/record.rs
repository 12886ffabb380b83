use std::path::{Path, PathBuf};
use std::process::ExitCode;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Version of the run-record layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Exit-code contract shared by all commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Holds = 0,
    Fails = 1,
    Error = 2,
    ConjecturalHold = 3,
    Inconclusive = 4,
}

impl From<Exit> for ExitCode {
    fn from(e: Exit) -> Self {
        ExitCode::from(e as u8)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Lib(#[from] symspec::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit(&self) -> Exit {
        match self {
            CliError::Lib(symspec::Error::Inconclusive(_)) => Exit::Inconclusive,
            _ => Exit::Error,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// What a command hands back: a verdict-bearing exit code and a JSON payload.
pub struct Reply {
    pub exit: Exit,
    pub seed: Option<u64>,
    pub payload: Value,
}

impl Reply {
    pub fn new(exit: Exit, payload: Value) -> Self {
        Self { exit, seed: None, payload }
    }

    pub fn seeded(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

/// Everything needed to re-run a command and check its output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub command: String,
    /// Command-line arguments after the program name.
    pub arguments: Vec<String>,
    pub seed: Option<u64>,
    pub exit_code: u8,
    pub payload: Value,
    pub timing: Timing,
    pub version: String,
}

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

/// Write via a temporary sibling and rename, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    let tmp = path.with_extension("tmp");
    let io = |source| CliError::Io { path: path.to_owned(), source };
    std::fs::write(&tmp, contents).map_err(io)?;
    std::fs::rename(&tmp, path).map_err(io)
}
