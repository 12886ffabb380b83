//! `symspec` command-line front end. Every run prints a JSON run record on
//! stdout; the exit code carries the verdict (see [`record::Exit`]).

mod args;
mod cmd;
mod record;

use std::ffi::OsString;
use std::io::Write as _;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde_json::json;

use args::{Cli, Command, ExperimentCommand, WitnessCommand};
use record::{read_text, write_atomic, CliError, CliResult, Exit, Reply, RunRecord, Timing, SCHEMA_VERSION};

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::AbsPpt(_) => "abs-ppt",
        Command::Witness(w) => match w {
            WitnessCommand::Eigs { .. } => "witness eigs",
            WitnessCommand::FromVector { .. } => "witness from-vector",
            WitnessCommand::Construct2q { .. } => "witness construct-2q",
            WitnessCommand::MaxNeg { .. } => "witness max-neg",
            WitnessCommand::Decomposable { .. } => "witness decomposable",
        },
        Command::SpectrumCheck(_) => "spectrum-check",
        Command::Experiment(e) => match e {
            ExperimentCommand::Fig1 { .. } => "experiment fig1",
            ExperimentCommand::Orderings { .. } => "experiment orderings",
        },
        Command::Replay { .. } => "replay",
    }
}

fn dispatch(c: &Command) -> CliResult<Reply> {
    match c {
        Command::AbsPpt(a) => cmd::abs_ppt::run(a),
        Command::Witness(w) => cmd::witness::run(w),
        Command::SpectrumCheck(s) => cmd::spectrum::run(s),
        Command::Experiment(e) => cmd::experiment::run(e),
        Command::Replay { record } => replay(record),
    }
}

/// Runs a parsed command and wraps its reply in a run record.
fn execute(cli: &Cli, arguments: Vec<String>) -> CliResult<RunRecord> {
    let start = Instant::now();
    let reply = dispatch(&cli.command)?;
    Ok(RunRecord {
        schema_version: SCHEMA_VERSION,
        command: command_name(&cli.command).to_string(),
        arguments,
        seed: reply.seed,
        exit_code: reply.exit as u8,
        payload: reply.payload,
        timing: Timing { elapsed_ms: start.elapsed().as_secs_f64() * 1e3 },
        version: symspec::VERSION.to_string(),
    })
}

fn replay(path: &Path) -> CliResult<Reply> {
    let saved: RunRecord = serde_json::from_str(&read_text(path)?)?;
    let argv = std::iter::once(OsString::from("symspec")).chain(saved.arguments.iter().map(OsString::from));
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::Usage(e.to_string()))?;
    if matches!(cli.command, Command::Replay { .. }) {
        return Err(CliError::Usage("refusing to replay a replay".into()));
    }
    let fresh = execute(&cli, saved.arguments.clone())?;
    let before = serde_json::to_string(&saved.payload)?;
    let after = serde_json::to_string(&fresh.payload)?;
    let identical = before == after && saved.exit_code == fresh.exit_code;
    let payload = json!({
        "replayed": saved.command,
        "identical": identical,
        "version_recorded": saved.version,
        "version_now": symspec::VERSION,
    });
    Ok(Reply::new(if identical { Exit::Holds } else { Exit::Fails }, payload))
}

fn main() -> ExitCode {
    let arguments: Vec<String> = std::env::args().skip(1).collect();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { Exit::Error.into() } else { ExitCode::SUCCESS };
        }
    };
    let outcome = execute(&cli, arguments).and_then(|rec| {
        let text = serde_json::to_string_pretty(&rec)?;
        if let Some(path) = &cli.record {
            write_atomic(path, &text)?;
        }
        // a closed pipe downstream is not an error of the run
        let _ = writeln!(std::io::stdout().lock(), "{text}");
        Ok(rec.exit_code)
    });
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit().into()
        }
    }
}
