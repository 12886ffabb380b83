use std::path::Path;

use serde_json::{json, Value};
use symspec::sdp::{self, DecomposabilityCheck};
use symspec::witness::{self, fixtures, SpectrumClass2q};
use symspec::{DenseJson, FullOperator, SolverSettings, SymVector};

use crate::args::WitnessCommand;
use crate::record::{read_text, write_atomic, CliError, CliResult, Exit, Reply};

/// Relative threshold for reporting an eigenvalue as negative.
const NEG_TOL: f64 = 1e-8;

fn read_vector(path: &Path) -> CliResult<SymVector> {
    let dense = DenseJson::parse(&read_text(path)?)?;
    Ok(SymVector::new(dense.d, dense.values())?)
}

fn negatives(ev: &[f64]) -> Vec<f64> {
    let scale = ev.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    ev.iter().copied().filter(|&e| e < -NEG_TOL * scale).collect()
}

/// Name of the shipped fixture with exactly these entries, if any.
fn matching_fixture(dense: &DenseJson) -> Option<&'static str> {
    fixtures::FIXTURE_NAMES.into_iter().find(|n| fixtures::fixture_json(n).as_ref() == Some(dense))
}

fn spectrum_summary(d: usize, ev: &[f64]) -> Value {
    let neg = negatives(ev);
    let (floor, upper) = witness::max_neg_bounds(d);
    json!({
        "spectrum": ev,
        "negative_count": neg.len(),
        "negative_eigenvalues": neg,
        "bound_real_symmetric": floor,
        "bound_general": upper,
    })
}

fn merge(mut a: Value, b: Value) -> Value {
    if let (Some(a), Value::Object(b)) = (a.as_object_mut(), b) {
        a.extend(b);
    }
    a
}

fn eigs(path: &Path) -> CliResult<Reply> {
    let v = read_vector(path)?;
    let predicted = witness::predicted_eigs_real_sym(&v)?;
    let numeric = witness::witness_from_vector(&v).eigenvalues()?;
    let deviation = predicted.values().iter().zip(&numeric).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let payload = json!({
        "d": v.d(),
        "predicted": predicted.values(),
        "numerical": numeric,
        "max_deviation": deviation,
    });
    Ok(Reply::new(Exit::Holds, merge(payload, spectrum_summary(v.d(), &numeric))))
}

fn from_vector(path: &Path, out: Option<&Path>) -> CliResult<Reply> {
    let dense = DenseJson::parse(&read_text(path)?)?;
    let v = SymVector::new(dense.d, dense.values())?;
    let w = witness::witness_from_vector(&v);
    let ev = w.eigenvalues()?;
    if let Some(out) = out {
        write_atomic(out, &DenseJson::from_matrix(v.d(), w.w.matrix()).to_json_pretty())?;
    }
    let (split_error, max_imag) = witness::split_identity_error(&v);
    let payload = json!({
        "d": v.d(),
        "fixture": matching_fixture(&dense),
        "symmetric": v.is_symmetric(),
        "real": v.is_real(),
        "max_imag_w": max_imag,
        "real_split_error": split_error,
    });
    Ok(Reply::new(Exit::Holds, merge(payload, spectrum_summary(v.d(), &ev))))
}

fn construct_2q(mu: &[f64]) -> CliResult<Reply> {
    let mu: [f64; 3] = mu.try_into().map_err(|_| CliError::Usage(format!("--mu needs 3 values, got {}", mu.len())))?;
    let class = witness::classify_2q_spectrum(mu)?;
    if class != SpectrumClass2q::Achievable {
        return Ok(Reply::new(Exit::Fails, json!({ "mu": mu, "classification": class })));
    }
    let (x, w) = witness::construct_two_qubit_witness(mu)?;
    let ev = w.eigenvalues()?;
    let payload = json!({
        "mu": mu,
        "classification": class,
        "x": DenseJson::from_matrix(2, x.matrix()),
        "w": DenseJson::from_matrix(2, w.w.matrix()),
    });
    Ok(Reply::new(Exit::Holds, merge(payload, spectrum_summary(2, &ev))))
}

fn max_neg(d: usize, seed: u64, tol: f64, out: Option<&Path>) -> CliResult<Reply> {
    let mn = sdp::build_max_neg_witness_with(d, &SolverSettings::with_tol(tol))?;
    let ev = mn.witness.eigenvalues()?;
    let sew = witness::check_sew_sampled(&mn.witness.w, witness::SEW_DEFAULT_SAMPLES, seed)?;
    if let Some(out) = out {
        write_atomic(out, &DenseJson::from_matrix(d, mn.witness.w.matrix()).to_json_pretty())?;
    }
    let (_, upper) = witness::max_neg_bounds(d);
    let payload = json!({
        "d": d,
        "c": mn.c,
        "overlap": {
            "primal": mn.overlap.c,
            "dual_bound": mn.overlap.dual_bound,
            "state_min_eigenvalue": mn.overlap.min_eigenvalue,
            "state_min_pt_eigenvalue": mn.overlap.min_pt_eigenvalue,
            "trace_error": mn.overlap.trace_error,
        },
        "sampled_check": sew,
        "tolerance": tol,
    });
    let exit = if mn.negative_count == upper { Exit::Holds } else { Exit::Fails };
    Ok(Reply::new(exit, merge(payload, spectrum_summary(d, &ev))).seeded(seed))
}

fn decomposable(path: &Path, symmetric_x: bool, tol: f64) -> CliResult<Reply> {
    let dense = DenseJson::parse(&read_text(path)?)?;
    let w = FullOperator::new(dense.d, dense.to_matrix()?)?;
    let res = sdp::is_decomposable_witness_with(&w, symmetric_x, &SolverSettings::with_tol(tol))?;
    let status = res.status();
    let detail = match &res {
        DecomposabilityCheck::Decomposable(dec) => json!({
            "x": DenseJson::from_matrix(dense.d, dec.x.matrix()),
            "y_sym": DenseJson::from_matrix(dense.d, dec.y.matrix()),
            "residual": dec.residual,
            "min_eigenvalue_x": dec.min_eigenvalue_x,
            "min_eigenvalue_y": dec.min_eigenvalue_y,
        }),
        DecomposabilityCheck::NotDecomposable { state, farkas } => json!({
            "farkas": farkas,
            "separating_state": state.as_ref().map(|s| json!({
                "z_sym": DenseJson::from_matrix(dense.d, s.z.matrix()),
                "overlap": s.overlap,
                "min_eigenvalue": s.min_eigenvalue,
                "min_pt_eigenvalue": s.min_pt_eigenvalue,
            })),
        }),
        DecomposabilityCheck::Inconclusive { message } => json!({ "message": message }),
    };
    let exit = match status {
        sdp::ConicStatus::Feasible => Exit::Holds,
        sdp::ConicStatus::Infeasible => Exit::Fails,
        sdp::ConicStatus::Inconclusive => Exit::Inconclusive,
    };
    let payload = json!({
        "d": dense.d,
        "require_symmetric_x": symmetric_x,
        "status": status,
        "tolerance": tol,
        "detail": detail,
    });
    Ok(Reply::new(exit, payload))
}

pub fn run(cmd: &WitnessCommand) -> CliResult<Reply> {
    match cmd {
        WitnessCommand::Eigs { file } => eigs(file),
        WitnessCommand::FromVector { file, out } => from_vector(file, out.as_deref()),
        WitnessCommand::Construct2q { mu } => construct_2q(&mu.0),
        WitnessCommand::MaxNeg { d, seed, solver, out } => max_neg(*d, *seed, solver.tol, out.as_deref()),
        WitnessCommand::Decomposable { file, general_x, solver } => decomposable(file, !general_x, solver.tol),
    }
}
