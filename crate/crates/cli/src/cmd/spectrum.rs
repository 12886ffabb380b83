use serde_json::json;
use symspec::matricize;
use symspec::sdp::{self, ConicStatus};
use symspec::witness;
use symspec::SolverSettings;

use crate::args::{Method, SpectrumCheckArgs};
use crate::record::{CliError, CliResult, Exit, Reply};

fn exit_for(status: ConicStatus) -> Exit {
    match status {
        ConicStatus::Feasible => Exit::Holds,
        ConicStatus::Infeasible => Exit::Fails,
        ConicStatus::Inconclusive => Exit::Inconclusive,
    }
}

fn closed_form(mu: &[f64]) -> CliResult<Reply> {
    let [m1, m2, m3] = mu else {
        return Err(CliError::Usage(format!("closed form needs 3 values, got {}", mu.len())));
    };
    let feasible = sdp::decomposable_spectrum_check_2d(*m1, *m2, *m3)?;
    let status = if feasible { ConicStatus::Feasible } else { ConicStatus::Infeasible };
    Ok(Reply::new(
        exit_for(status),
        json!({
            "d": 2,
            "mu": mu,
            "method": "closed-form",
            "status": status,
            "criterion": "mu3 >= -sqrt(mu1 mu2)",
            "program_region": sdp::spectrum_program_region_2d(*m1, *m2, *m3)?,
            "classification": witness::classify_2q_spectrum([*m1, *m2, *m3])?,
        }),
    ))
}

fn solve(mu: &[f64], d: usize, settings: &SolverSettings) -> CliResult<(sdp::SpectrumCheck, &'static str)> {
    Ok(match d {
        3 => (sdp::decomposable_spectrum_check_3d_with(mu, settings)?, "single-block d=3"),
        2 | 4..=6 => {
            let set = matricize::reduced_assignments_cached(d)?;
            (sdp::decomposable_spectrum_check_with(mu, d, set, settings)?, "reduced assignments")
        }
        _ => return Err(CliError::Lib(symspec::Error::UnsupportedDimension { supported: "2..=6", got: d })),
    })
}

pub fn run(args: &SpectrumCheckArgs) -> CliResult<Reply> {
    let mu = &args.mu.0;
    if args.method == Method::ClosedForm {
        if args.d != 2 {
            return Err(CliError::Usage("the closed form exists only for d = 2; use --method sdp".into()));
        }
        return closed_form(mu);
    }
    let settings = SolverSettings::with_tol(args.solver.tol);
    let (check, program) = solve(mu, args.d, &settings)?;
    let status = check.status();
    Ok(Reply::new(
        exit_for(status),
        json!({
            "d": args.d,
            "mu": mu,
            "method": "sdp",
            "program": program,
            "tolerance": args.solver.tol,
            "status": status,
            "result": check,
        }),
    ))
}
