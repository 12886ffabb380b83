use std::ops::RangeInclusive;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::json;
use symspec::matricize;
use symspec::oracle::{SearchCheckpoint, VectorClass};
use symspec::witness::max_neg_bounds;

use crate::args::{ExperimentArgs, ExperimentCommand};
use crate::record::{read_text, write_atomic, CliError, CliResult, Exit, Reply};

/// Trials between checkpoint saves.
const CHUNK: u64 = 10_000;

#[derive(Debug, Serialize, Deserialize)]
struct Fig1Checkpoint {
    vector_class: VectorClass,
    seed: u64,
    searches: Vec<SearchCheckpoint>,
}

#[derive(Debug, Serialize)]
struct Fig1Row {
    d: usize,
    lower_bound_real_sym: usize,
    upper_bound: usize,
    observed_max: usize,
    best_trial: Option<u64>,
    trials: u64,
    seed: u64,
    vector_class: String,
}

#[derive(Debug, Serialize)]
struct OrderingRow {
    d: usize,
    orderings: usize,
    samples: u64,
    last_new_sample: u64,
    saturated: bool,
    seed: u64,
}

fn to_csv<T: Serialize>(rows: &[T]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn load_checkpoint(path: &Path, class: VectorClass, seed: u64) -> CliResult<Fig1Checkpoint> {
    if !path.exists() {
        return Ok(Fig1Checkpoint { vector_class: class, seed, searches: Vec::new() });
    }
    let cp: Fig1Checkpoint = serde_json::from_str(&read_text(path)?)?;
    if cp.vector_class != class || cp.seed != seed {
        return Err(CliError::Usage(format!(
            "checkpoint {} was written for class {} seed {}",
            path.display(),
            cp.vector_class,
            cp.seed
        )));
    }
    Ok(cp)
}

fn fig1(args: &ExperimentArgs, class: VectorClass, resume: Option<&Path>) -> CliResult<Reply> {
    let mut cp = match resume {
        Some(p) => load_checkpoint(p, class, args.seed)?,
        None => Fig1Checkpoint { vector_class: class, seed: args.seed, searches: Vec::new() },
    };
    let save = |cp: &Fig1Checkpoint| -> CliResult<()> {
        match resume {
            Some(p) => write_atomic(p, &serde_json::to_string_pretty(cp)?),
            None => Ok(()),
        }
    };
    let mut reports = Vec::new();
    for d in args.d_range.clone() {
        let k = match cp.searches.iter().position(|s| s.d == d) {
            Some(k) => k,
            None => {
                cp.searches.push(SearchCheckpoint::new(d, class, args.seed)?);
                cp.searches.len() - 1
            }
        };
        if cp.searches[k].next_trial > args.trials {
            return Err(CliError::Usage(format!(
                "checkpoint for d={d} is already at trial {} > --trials {}",
                cp.searches[k].next_trial, args.trials
            )));
        }
        while cp.searches[k].next_trial < args.trials {
            let n = CHUNK.min(args.trials - cp.searches[k].next_trial);
            cp.searches[k].advance(n);
            save(&cp)?;
        }
        reports.push(cp.searches[k].report());
    }
    let rows: Vec<Fig1Row> = reports
        .iter()
        .map(|r| {
            let (lower, upper) = max_neg_bounds(r.d);
            Fig1Row {
                d: r.d,
                lower_bound_real_sym: lower,
                upper_bound: upper,
                observed_max: r.best_count,
                best_trial: r.best_trial,
                trials: r.trials,
                seed: r.seed,
                vector_class: r.vector_class.to_string(),
            }
        })
        .collect();
    let csv = to_csv(&rows)?;
    if let Some(out) = &args.out {
        write_atomic(out, &csv)?;
    }
    let within = reports.iter().all(|r| r.within_bounds());
    let exit = if within { Exit::Holds } else { Exit::Fails };
    let payload = json!({
        "experiment": "fig1",
        "note": "observed maxima are lower bounds on the true maxima",
        "csv": csv,
        "reports": reports,
    });
    Ok(Reply::new(exit, payload).seeded(args.seed))
}

fn orderings(args: &ExperimentArgs) -> CliResult<Reply> {
    let rows = args
        .d_range
        .clone()
        .map(|d| {
            let r = matricize::reduced_assignments(d, args.trials, args.seed)?;
            Ok(OrderingRow {
                d,
                orderings: r.count(),
                samples: r.samples,
                last_new_sample: r.last_new_sample,
                saturated: r.saturated(),
                seed: args.seed,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let csv = to_csv(&rows)?;
    if let Some(out) = &args.out {
        write_atomic(out, &csv)?;
    }
    let payload = json!({ "experiment": "orderings", "csv": csv, "rows": rows });
    Ok(Reply::new(Exit::Holds, payload).seeded(args.seed))
}

fn check_range(r: &RangeInclusive<usize>, lo: usize, hi: usize) -> CliResult<()> {
    if *r.start() < lo || *r.end() > hi {
        return Err(CliError::Usage(format!("--d-range must lie within {lo}..{hi}")));
    }
    Ok(())
}

pub fn run(cmd: &ExperimentCommand) -> CliResult<Reply> {
    match cmd {
        ExperimentCommand::Fig1 { common, class, resume } => {
            check_range(&common.d_range, 1, 12)?;
            fig1(common, *class, resume.as_deref())
        }
        ExperimentCommand::Orderings { common } => {
            check_range(&common.d_range, 2, 6)?;
            orderings(common)
        }
    }
}
