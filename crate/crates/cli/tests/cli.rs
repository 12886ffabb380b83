use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

struct Run {
    code: i32,
    record: Option<Value>,
    stderr: String,
}

impl Run {
    fn payload(&self) -> &Value {
        &self.record.as_ref().expect("run record on stdout")["payload"]
    }
}

fn symspec_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_symspec"));
    cmd.args(args).env_remove("SYMSPEC_TOL");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("spawn symspec");
    Run {
        code: out.status.code().expect("exit code"),
        record: serde_json::from_slice(&out.stdout).ok(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn symspec(args: &[&str]) -> Run {
    symspec_env(args, &[])
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn abs_ppt_exit_codes() {
    let r = symspec(&["abs-ppt", "--d", "2", "--eigs", "0.34,0.33,0.33"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.payload()["status"], "holds");
    assert_eq!(r.payload()["verdict"]["holds"], true);

    let r = symspec(&["abs-ppt", "--d", "2", "--eigs", "0.6,0.2,0.2"]);
    assert_eq!(r.code, 1);
    assert!(r.payload()["verdict"]["certificate"].is_object());

    let r = symspec(&["abs-ppt", "--d", "4", "--eigs", "0.1,0.1,0.1,0.1,0.1,0.1,0.1,0.1,0.1,0.1"]);
    assert_eq!(r.code, 3);
    assert_eq!(r.payload()["status"], "conjectural-hold");
    assert_eq!(r.payload()["verdict"]["mode"], "conjectural");
}

#[test]
fn abs_ppt_modes_and_inference() {
    let eigs = "0.2,0.18,0.17,0.16,0.15,0.14";
    for mode in ["fastpath", "reduced", "full"] {
        let r = symspec(&["abs-ppt", "--eigs", eigs, "--mode", mode]);
        assert_eq!(r.code, 0, "{mode}: {}", r.stderr);
        assert_eq!(r.payload()["d"], 3);
        assert_eq!(r.payload()["property"], "absolutely symmetric PPT");
    }
    let r = symspec(&["abs-ppt", "--d", "3", "--eigs", eigs, "--mode", "conjectural"]);
    assert_eq!(r.code, 2);
}

#[test]
fn abs_ppt_state_file() {
    let dir = tempfile::tempdir().unwrap();
    // maximally mixed two-qubit symmetric state, on the full space
    let mut entries = vec!["[0.0, 0.0]"; 16];
    let third = "[0.3333333333333333, 0.0]";
    let sixth = "[0.16666666666666666, 0.0]";
    entries[0] = third;
    entries[15] = third;
    for k in [5, 6, 9, 10] {
        entries[k] = sixth;
    }
    let file = dir.path().join("rho.json");
    std::fs::write(&file, format!("{{\"d\": 2, \"entries\": [{}]}}", entries.join(", "))).unwrap();
    let r = symspec(&["abs-ppt", "--state-file", path_str(&file)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.payload()["property"], "absolutely symmetric separable");

    let r = symspec(&["abs-ppt", "--d", "3", "--state-file", path_str(&file)]);
    assert_eq!(r.code, 2);
}

#[test]
fn malformed_input_exits_2() {
    for args in [
        vec!["abs-ppt", "--eigs", "0.5,x"],
        vec!["abs-ppt", "--d", "2", "--eigs", "0.5,0.5"],
        vec!["abs-ppt", "--d", "2", "--eigs", "0.5,0.4,0.4"],
        vec!["abs-ppt", "--d", "2", "--state-file", "/nonexistent/file.json"],
        vec!["spectrum-check", "--d", "2", "--mu", "-1,1,1"],
        vec!["spectrum-check", "--d", "3", "--mu", "1,1,1,1,1,-1", "--method", "closed-form"],
        vec!["witness", "eigs", "--file", "/nonexistent/v.json"],
        vec!["experiment", "orderings", "--d-range", "5..2", "--trials", "10"],
        vec!["no-such-command"],
    ] {
        let r = symspec(&args);
        assert_eq!(r.code, 2, "{args:?}");
        assert!(!r.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn witness_from_fixture_vectors() {
    let r = symspec(&["witness", "from-vector", "--file", path_str(&data("d3_complex_sym.json"))]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let p = r.payload();
    assert_eq!(p["fixture"], "d3_complex_sym");
    assert_eq!(p["negative_count"], 3);
    for e in p["negative_eigenvalues"].as_array().unwrap() {
        assert!((e.as_f64().unwrap() + 1.0).abs() < 1e-8);
    }

    let r = symspec(&["witness", "from-vector", "--vector-file", path_str(&data("d3_real_full.json"))]);
    let p = r.payload();
    assert_eq!(p["negative_count"], 3);
    assert_eq!(p["symmetric"], false);
    for e in p["negative_eigenvalues"].as_array().unwrap() {
        assert!((e.as_f64().unwrap() + 0.5).abs() < 1e-8);
    }

    // not real symmetric, so no closed-form spectrum
    let r = symspec(&["witness", "eigs", "--file", path_str(&data("d3_real_full.json"))]);
    assert_eq!(r.code, 2);
}

#[test]
fn witness_eigs_real_symmetric() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("v.json");
    // v = e1⊗e1 - e2⊗e2 + 0.5 (e1⊗e2 + e2⊗e1)
    std::fs::write(&file, r#"{"d": 2, "entries": [[1.0, 0.0], [0.5, 0.0], [0.5, 0.0], [-1.0, 0.0]]}"#).unwrap();
    let r = symspec(&["witness", "eigs", "--file", path_str(&file)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.payload()["max_deviation"].as_f64().unwrap() < 1e-10);
    assert_eq!(r.payload()["negative_count"], 1);
}

#[test]
fn witness_construct_2q() {
    let r = symspec(&["witness", "construct-2q", "--mu", "1,1,-1"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let got: Vec<f64> = r.payload()["spectrum"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    for (g, e) in got.iter().zip([1.0, 1.0, 0.0, -1.0]) {
        assert!((g - e).abs() < 1e-10, "{got:?}");
    }
    let r = symspec(&["witness", "construct-2q", "--mu", "1,0.1,-0.5"]);
    assert_eq!(r.code, 1);
    assert_eq!(r.payload()["classification"], "excluded");
}

#[test]
fn witness_max_neg_and_decomposable() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w.json");
    let r = symspec(&["witness", "max-neg", "--d", "2", "--out", path_str(&out)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.payload()["negative_count"], 1);
    assert!((r.payload()["c"].as_f64().unwrap() - 0.5).abs() < 1e-6);
    assert!(out.exists());

    let w = data("example_non_decomposable_w.json");
    let r = symspec(&["witness", "decomposable", "--file", path_str(&w)]);
    assert_eq!(r.code, 1, "{}", r.stderr);
    assert_eq!(r.payload()["status"], "infeasible");
}

#[test]
fn spectrum_check_examples() {
    let r = symspec(&["spectrum-check", "--d", "2", "--mu", "1,1,-1", "--method", "closed-form"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.payload()["status"], "feasible");

    let r = symspec(&["spectrum-check", "--d", "2", "--mu", "1,0.1,-0.5"]);
    assert_eq!(r.code, 1, "{}", r.stderr);
    assert_eq!(r.payload()["status"], "infeasible");

    let r = symspec(&["spectrum-check", "--d", "3", "--mu", "1,1,1,1,1,-1"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.payload()["program"], "single-block d=3");
}

#[test]
fn tolerance_from_environment() {
    let args = ["spectrum-check", "--d", "2", "--mu", "1,1,-1"];
    let r = symspec_env(&args, &[("SYMSPEC_TOL", "1e-6")]);
    assert_eq!(r.payload()["tolerance"], 1e-6);
    let r = symspec_env(&args, &[("SYMSPEC_TOL", "abc")]);
    assert_eq!(r.code, 2);
    let r = symspec(&args);
    assert_eq!(r.payload()["tolerance"], 1e-7);
}

/// Deterministic low-discrepancy points, sorted into witness spectra with `μ2 >= 0`.
fn scripted_mu(k: usize) -> [f64; 3] {
    let frac = |x: f64| x - x.floor();
    let g = [0.819_172_513_396_164_4, 0.671_043_606_703_789_2, 0.549_700_477_901_970_6];
    let u: Vec<f64> = g.iter().map(|a| frac(0.5 + a * (k + 1) as f64)).collect();
    let m1 = 0.05 + u[0];
    let m2 = m1 * u[1];
    let m3 = -1.2 * m1 * u[2];
    [m1, m2, m3]
}

/// The solver against both closed forms on 10³ scripted spectra. The solver
/// matches the exact program region everywhere; the `-√(μ1 μ2)` criterion
/// differs from it only where `μ2 < μ1/4`.
#[test]
fn closed_form_vs_sdp_harness() {
    let (mut disagree_b, mut outside_gap, mut disagree_region, mut compared) = (0, 0, 0, 0);
    for k in 0..1000 {
        let [m1, m2, m3] = scripted_mu(k);
        let near_b = (m3 + (m1 * m2).sqrt()).abs() < 1e-6;
        let near_c = (m3 + m2 + m1 / 4.0).abs() < 1e-6;
        if near_b || near_c {
            continue;
        }
        let mu = format!("{m1},{m2},{m3}");
        let cf = symspec(&["spectrum-check", "--d", "2", "--mu", &mu, "--method", "closed-form"]);
        let sd = symspec(&["spectrum-check", "--d", "2", "--mu", &mu, "--method", "sdp", "--tol", "1e-8"]);
        assert!(sd.code == 0 || sd.code == 1, "{mu}: exit {} {}", sd.code, sd.stderr);
        compared += 1;
        let sdp_feasible = sd.code == 0;
        if cf.payload()["program_region"].as_bool().unwrap() != sdp_feasible {
            disagree_region += 1;
        }
        if (cf.code == 0) != sdp_feasible {
            disagree_b += 1;
            outside_gap += usize::from(m2 >= m1 / 4.0);
        }
    }
    eprintln!("{compared} spectra, {disagree_b} differ from mu3 >= -sqrt(mu1 mu2), all with mu2 < mu1/4");
    assert_eq!(disagree_region, 0);
    assert_eq!(outside_gap, 0);
}

#[test]
fn experiment_orderings() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("orderings.csv");
    let r = symspec(&["experiment", "orderings", "--d-range", "2..4", "--trials", "1e5", "--out", path_str(&out)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let csv = std::fs::read_to_string(&out).unwrap();
    let counts: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(counts, ["1", "4", "26"]);
}

#[test]
fn experiment_fig1_is_deterministic_and_resumable() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n);
    let base = ["experiment", "fig1", "--d-range", "2..3", "--seed", "7"];
    let run = |trials: &str, out: &Path, resume: Option<&Path>| {
        let mut args: Vec<&str> = base.to_vec();
        args.extend(["--trials", trials, "--out", path_str(out)]);
        if let Some(cp) = resume {
            args.extend(["--resume", path_str(cp)]);
        }
        symspec(&args)
    };

    let a = run("25000", &p("a.csv"), None);
    assert_eq!(a.code, 0, "{}", a.stderr);
    let b = run("25000", &p("b.csv"), None);
    let a_csv = std::fs::read(p("a.csv")).unwrap();
    assert_eq!(a_csv, std::fs::read(p("b.csv")).unwrap());
    assert_eq!(a.payload(), b.payload());

    let text = String::from_utf8(a_csv.clone()).unwrap();
    let observed: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(3).unwrap()).collect();
    assert_eq!(observed, ["1", "3"]);

    // stop at 12000 trials, then continue to 25000 from the checkpoint
    let cp = p("cp.json");
    assert_eq!(run("12000", &p("part.csv"), Some(&cp)).code, 0);
    let resumed = run("25000", &p("c.csv"), Some(&cp));
    assert_eq!(resumed.code, 0, "{}", resumed.stderr);
    assert_eq!(a_csv, std::fs::read(p("c.csv")).unwrap());

    // a checkpoint past the requested budget is refused
    assert_eq!(run("1000", &p("d.csv"), Some(&cp)).code, 2);
}

#[test]
fn replay_reproduces_payload() {
    let dir = tempfile::tempdir().unwrap();
    let rec = dir.path().join("run.json");
    let r = symspec(&["--record", path_str(&rec), "experiment", "fig1", "--d-range", "2", "--trials", "2000", "--seed", "3"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&rec).unwrap()).unwrap();
    assert_eq!(saved["seed"], 3);
    assert_eq!(saved["command"], "experiment fig1");
    assert_eq!(saved["version"], env!("CARGO_PKG_VERSION"));
    assert!(saved["timing"]["elapsed_ms"].is_number());

    let re = symspec(&["replay", path_str(&rec)]);
    assert_eq!(re.code, 0, "{}", re.stderr);
    assert_eq!(re.payload()["identical"], true);
}
