use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use symspec::oracle::VectorClass;
use symspec::CheckMode;

#[derive(Debug, Parser)]
#[command(name = "symspec", version, about = "Spectral separability checks and symmetric entanglement witnesses")]
pub struct Cli {
    /// Also write the run record to this file.
    #[arg(long, global = true, value_name = "PATH")]
    pub record: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Is every state with this spectrum PPT (for d = 2: separable)?
    AbsPpt(AbsPptArgs),
    /// Witness constructions and spectra.
    #[command(subcommand)]
    Witness(WitnessCommand),
    /// Can a decomposable symmetric witness have spectrum mu?
    SpectrumCheck(SpectrumCheckArgs),
    /// Negative-eigenvalue search and ordering-count experiments.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
    /// Re-run a saved run record and compare payloads byte for byte.
    Replay {
        #[arg(value_name = "RECORD")]
        record: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Fastpath,
    Reduced,
    Full,
    Conjectural,
}

impl From<ModeArg> for CheckMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Fastpath => CheckMode::Fastpath,
            ModeArg::Reduced => CheckMode::Reduced,
            ModeArg::Full => CheckMode::Full,
            ModeArg::Conjectural => CheckMode::Conjectural,
        }
    }
}

#[derive(Debug, Args)]
pub struct AbsPptArgs {
    /// Local dimension; inferred from the input when omitted.
    #[arg(long)]
    pub d: Option<usize>,
    /// Comma-separated eigenvalues summing to one.
    #[arg(long, value_parser = parse_reals, conflicts_with = "state_file", required_unless_present = "state_file")]
    pub eigs: Option<Reals>,
    /// Density matrix as JSON, on the symmetric subspace or on C^d ⊗ C^d.
    #[arg(long, value_name = "PATH")]
    pub state_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "fastpath")]
    pub mode: ModeArg,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// Solver tolerance.
    #[arg(long, env = "SYMSPEC_TOL", default_value_t = symspec::sdp::DEFAULT_TOL, value_parser = parse_tol)]
    pub tol: f64,
}

#[derive(Debug, Subcommand)]
pub enum WitnessCommand {
    /// Predicted `α_i α_j` spectrum of a real symmetric vector against the numerical one.
    Eigs {
        #[arg(long, alias = "vector-file", value_name = "PATH")]
        file: PathBuf,
    },
    /// Spectrum and negative count of `P∨(vv*)^Γ P∨`.
    FromVector {
        #[arg(long, alias = "vector-file", value_name = "PATH")]
        file: PathBuf,
        /// Write the witness matrix to this file.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Two-qubit decomposable witness with spectrum `{mu1, mu2, mu3, 0}`.
    #[command(name = "construct-2q")]
    Construct2q {
        #[arg(long, value_parser = parse_reals, allow_hyphen_values = true)]
        mu: Reals,
    },
    /// Witness with `d(d-1)/2` negative eigenvalues.
    MaxNeg {
        #[arg(long)]
        d: usize,
        /// Seed of the sampled product-vector check.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Decomposability of a witness given as a d² x d² JSON matrix.
    Decomposable {
        #[arg(long, value_name = "PATH")]
        file: PathBuf,
        /// Drop the requirement `P∨ X P∨ = X`.
        #[arg(long)]
        general_x: bool,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    ClosedForm,
    Sdp,
}

#[derive(Debug, Args)]
pub struct SpectrumCheckArgs {
    #[arg(long)]
    pub d: usize,
    /// Comma-separated, non-increasing.
    #[arg(long, value_parser = parse_reals, allow_hyphen_values = true)]
    pub mu: Reals,
    #[arg(long, value_enum, default_value = "sdp")]
    pub method: Method,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Subcommand)]
pub enum ExperimentCommand {
    /// Observed maximum negative-eigenvalue counts next to both bounds.
    Fig1 {
        #[command(flatten)]
        common: ExperimentArgs,
        #[arg(long, default_value = "complex_full", value_parser = parse_class)]
        class: VectorClass,
        /// Checkpoint file; progress is loaded from it and saved to it.
        #[arg(long, value_name = "PATH")]
        resume: Option<PathBuf>,
    },
    /// Number of distinct product orderings per dimension.
    Orderings {
        #[command(flatten)]
        common: ExperimentArgs,
    },
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Inclusive range such as `2..5`, or a single dimension.
    #[arg(long, value_parser = parse_range)]
    pub d_range: RangeInclusive<usize>,
    #[arg(long, value_parser = parse_count)]
    pub trials: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// CSV output path.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

/// A comma-separated list of reals.
#[derive(Debug, Clone, PartialEq)]
pub struct Reals(pub Vec<f64>);

pub fn parse_reals(s: &str) -> Result<Reals, String> {
    s.split(',')
        .map(|t| {
            let v: f64 = t.trim().parse().map_err(|_| format!("not a number: {t:?}"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("not finite: {t:?}"))
            }
        })
        .collect::<Result<_, _>>()
        .map(Reals)
}

fn parse_tol(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(t) if t > 0.0 && t < 1.0 => Ok(t),
        _ => Err(format!("tolerance must be in (0, 1), got {s:?}")),
    }
}

/// Accepts `1000000` as well as `1e6`.
pub fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.fract() == 0.0 && x <= 1e15 => Ok(x as u64),
        _ => Err(format!("not a trial count: {s:?}")),
    }
}

pub fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let bad = || format!("expected `a..b` or `a..=b` or `a`, got {s:?}");
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (a, b.strip_prefix('=').unwrap_or(b)),
        None => (s, s),
    };
    let lo: usize = lo.trim().parse().map_err(|_| bad())?;
    let hi: usize = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok(lo..=hi)
}

fn parse_class(s: &str) -> Result<VectorClass, String> {
    s.parse().map_err(|e: symspec::Error| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("2..5").unwrap(), 2..=5);
        assert_eq!(parse_range("2..=5").unwrap(), 2..=5);
        assert_eq!(parse_range("3").unwrap(), 3..=3);
        assert!(parse_range("5..2").is_err());
        assert!(parse_range("a..2").is_err());
    }

    #[test]
    fn counts() {
        assert_eq!(parse_count("1e6").unwrap(), 1_000_000);
        assert_eq!(parse_count("250").unwrap(), 250);
        assert!(parse_count("1.5").is_err());
        assert!(parse_count("-3").is_err());
    }

    #[test]
    fn reals() {
        assert_eq!(parse_reals("1, 1,-1").unwrap().0, vec![1.0, 1.0, -1.0]);
        assert!(parse_reals("1,,2").is_err());
        assert!(parse_reals("nan").is_err());
    }

    #[test]
    fn tolerances() {
        assert!(parse_tol("1e-8").is_ok());
        assert!(parse_tol("0").is_err());
        assert!(parse_tol("abc").is_err());
    }

    #[test]
    fn cli_is_well_formed() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
