use serde_json::json;
use symspec::symspace::{self, sym_dim};
use symspec::{abssep, CheckMode, DenseJson, FullOperator, Spectrum, SymOperator};

use crate::args::AbsPptArgs;
use crate::record::{read_text, CliError, CliResult, Exit, Reply};

/// Smallest `d` with `d(d+1)/2 == m`.
fn dim_from_sym(m: usize) -> Option<usize> {
    (1..=16).find(|&d| sym_dim(d) == m)
}

/// Eigenvalues of a state file, given either on the symmetric subspace
/// (`m x m`) or on the full space (`d² x d²`).
fn spectrum_from_file(args: &AbsPptArgs, text: &str) -> CliResult<(usize, Vec<f64>)> {
    let dense = DenseJson::parse(text)?;
    let m = dense.to_matrix()?;
    let n = m.nrows();
    let d = args.d.unwrap_or(dense.d);
    if d != dense.d {
        return Err(CliError::Usage(format!("--d {d} disagrees with file dimension {}", dense.d)));
    }
    let ev = if n == sym_dim(d) {
        SymOperator::new(d, m)?.eigenvalues()?
    } else if n == d * d {
        symspace::compress(&FullOperator::new(d, m)?)?.eigenvalues()?
    } else {
        return Err(CliError::Usage(format!("{n}x{n} matrix fits neither Sym(C^{d} ⊗ C^{d}) nor C^{d} ⊗ C^{d}")));
    };
    // rounding noise below zero
    Ok((d, ev.into_iter().map(|v| if v > -1e-10 { v.max(0.0) } else { v }).collect()))
}

pub fn run(args: &AbsPptArgs) -> CliResult<Reply> {
    let (d, values) = match (&args.eigs, &args.state_file) {
        (Some(eigs), _) => {
            let d = match args.d {
                Some(d) => d,
                None => dim_from_sym(eigs.0.len())
                    .ok_or_else(|| CliError::Usage(format!("{} eigenvalues is not d(d+1)/2", eigs.0.len())))?,
            };
            (d, eigs.0.clone())
        }
        (None, Some(path)) => spectrum_from_file(args, &read_text(path)?)?,
        (None, None) => return Err(CliError::Usage("give --eigs or --state-file".into())),
    };
    let spectrum = Spectrum::state(values)?;
    let verdict = abssep::is_abs_sym_ppt(&spectrum, d, args.mode.into())?;
    let conjectural = verdict.mode == CheckMode::Conjectural;
    let (exit, status) = match (verdict.holds, conjectural) {
        (true, false) => (Exit::Holds, "holds"),
        (true, true) => (Exit::ConjecturalHold, "conjectural-hold"),
        (false, _) => (Exit::Fails, "fails"),
    };
    // PPT and separability coincide only for two qubits.
    let property = if d == 2 { "absolutely symmetric separable" } else { "absolutely symmetric PPT" };
    Ok(Reply::new(
        exit,
        json!({
            "d": d,
            "spectrum": spectrum.values(),
            "status": status,
            "property": property,
            "verdict": verdict,
        }),
    ))
}
