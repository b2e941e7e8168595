use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use jumpfk_cli::{emit_plotdata, run_experiment, Experiment, Overrides};
use serde_json::{json, Value};
use tempfile::TempDir;

fn small_config() -> Value {
    json!({
        "grid": { "dim": 1, "extent": 10.0, "points": 32 },
        "model": { "kappa_plus": 2.0, "kappa_minus": 1.0, "mortality": 1.0 },
        "kernels": {
            "a_plus": { "gaussian": { "sigma": 1.0 } },
            "a_minus": { "gaussian": { "sigma": 1.0 } }
        },
        "solver": { "horizon": 2.0, "dt": 0.01, "store_every": 20 },
        "monte_carlo": { "n_paths": 400, "master_seed": 11 },
        "initial": { "kind": "sine", "base": 1.0, "amplitude": 0.5, "mode": 1.0 },
        "fk_verify": { "t": 0.5, "dt": 0.005, "eval_points": [0, 8, 16, 24] },
        "stability": { "block_length": 0.5, "n_blocks": 4 },
        "taylor": { "order": 4 }
    })
}

fn write_config(dir: &Path, cfg: &Value) -> PathBuf {
    let path = dir.join("config.json");
    fs::write(&path, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    path
}

fn jumpfk(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_jumpfk"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn run(exp: Experiment, cfg: &Path, out: &Path, stamp: &str) -> jumpfk_cli::RunSummary {
    run_experiment(exp, cfg, out, &Overrides::default(), stamp).expect("valid config")
}

#[test]
fn every_experiment_passes_on_a_small_benchmark() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), &small_config());
    let out = tmp.path().join("runs");
    for exp in [
        Experiment::Solve,
        Experiment::FkVerify,
        Experiment::Stability,
        Experiment::Taylor,
        Experiment::Assumptions,
    ] {
        let s = run(exp, &cfg, &out, "2026-01-01T00:00:00.000Z");
        let r = report(&s.dir);
        assert!(s.passed, "{}: {}", exp.name(), r["violations"]);
        assert_eq!(s.exit_code(), 0);
        assert_eq!(r["subcommand"], exp.name());
        assert_eq!(r["config_hash"].as_str().unwrap().len(), 64);
    }
}

#[test]
fn reports_are_identical_apart_from_the_timestamp() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), &small_config());
    let out = tmp.path().join("runs");
    for exp in [Experiment::FkVerify, Experiment::Stability] {
        let a = run(exp, &cfg, &out, "2026-01-01T00:00:00.000Z");
        let b = run(exp, &cfg, &out, "2026-01-01T00:00:01.000Z");
        let (mut ra, mut rb) = (report(&a.dir), report(&b.dir));
        assert_ne!(ra["timestamp"], rb["timestamp"]);
        ra["timestamp"] = Value::Null;
        rb["timestamp"] = Value::Null;
        assert_eq!(ra, rb, "{}", exp.name());
    }
}

#[test]
fn run_directories_are_never_reused() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), &small_config());
    let out = tmp.path().join("runs");
    let stamp = "2026-01-01T00:00:00.000Z";
    let first = run(Experiment::Assumptions, &cfg, &out, stamp);
    let before = fs::read(first.dir.join("report.json")).unwrap();
    let second = run(Experiment::Assumptions, &cfg, &out, stamp);
    let third = run(Experiment::Assumptions, &cfg, &out, stamp);
    assert_ne!(first.dir, second.dir);
    assert_ne!(second.dir, third.dir);
    assert_eq!(fs::read(first.dir.join("report.json")).unwrap(), before);
}

#[test]
fn config_errors_exit_two_and_list_every_field() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = small_config();
    cfg["grid"]["points"] = json!(0);
    cfg["model"]["kappa_minus"] = json!(-1.0);
    cfg["solver"]["dt"] = json!(0.03);
    cfg["monte_carlo"]["n_paths"] = json!(3);
    let path = write_config(tmp.path(), &cfg);
    let out = tmp.path().join("runs");
    let (code, stderr) = jumpfk(&[
        "solve",
        "--config",
        path.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
    for field in ["grid", "model", "solver.dt", "monte_carlo.n_paths"] {
        assert!(stderr.contains(field), "{field} missing from:\n{stderr}");
    }
    assert!(!out.exists(), "nothing is written for an invalid config");
}

#[test]
fn unknown_keys_are_config_errors() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = small_config();
    cfg["solver"]["step"] = json!(0.1);
    let path = write_config(tmp.path(), &cfg);
    let (code, stderr) = jumpfk(&[
        "solve",
        "--config",
        path.to_str().unwrap(),
        "--out",
        tmp.path().join("runs").to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
    assert!(stderr.contains("step"), "{stderr}");
}

#[test]
fn violated_assumption_exits_one_and_is_named() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = small_config();
    // a narrow birth kernel under a wide competition kernel makes J_theta negative in the tails
    cfg["kernels"]["a_plus"] = json!({ "gaussian": { "sigma": 0.5 } });
    cfg["kernels"]["a_minus"] = json!({ "gaussian": { "sigma": 2.0 } });
    let path = write_config(tmp.path(), &cfg);
    let out = tmp.path().join("runs");
    let (code, _) = jumpfk(&[
        "stability",
        "--config",
        path.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--quiet",
    ]);
    assert_eq!(code, 1);
    let dir = fs::read_dir(&out).unwrap().next().unwrap().unwrap().path();
    let r = report(&dir);
    assert_eq!(r["passed"], false);
    let v = r["violations"][0].as_str().unwrap();
    assert!(v.contains("j_theta_nonneg"), "{v}");
    let flag = r["assumptions"]
        .as_array()
        .unwrap()
        .iter()
        .find(|f| f["name"] == "j_theta_nonneg")
        .unwrap();
    assert_eq!(flag["holds"], false);
}

#[test]
fn stationary_solutions_are_recognised() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = small_config();
    for (factor, kind) in [(1.0, "theta"), (0.0, "zero")] {
        cfg["initial"] = json!({ "kind": "theta_multiple", "factor": factor });
        let path = write_config(tmp.path(), &cfg);
        let s = run(Experiment::Solve, &path, &tmp.path().join("runs"), "t");
        let r = report(&s.dir);
        assert_eq!(r["results"]["stationary"], kind);
        assert!(r["results"]["stationary_drift"].as_f64().unwrap() <= 1e-12);
    }
}

#[test]
fn seed_override_changes_only_the_monte_carlo_part() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), &small_config());
    let out = tmp.path().join("runs");
    let a = run(Experiment::FkVerify, &cfg, &out, "a");
    let b = run_experiment(
        Experiment::FkVerify,
        &cfg,
        &out,
        &Overrides {
            seed: Some(12),
            paths: None,
        },
        "b",
    )
    .unwrap();
    let (ra, rb) = (report(&a.dir), report(&b.dir));
    assert_ne!(ra["config_hash"], rb["config_hash"]);
    assert_eq!(ra["results"]["duhamel"], rb["results"]["duhamel"]);
    assert_ne!(
        ra["results"]["monte_carlo"]["mean"],
        rb["results"]["monte_carlo"]["mean"]
    );
}

#[test]
fn plotdata_on_an_empty_directory_is_a_no_op() {
    let tmp = TempDir::new().unwrap();
    let summary = emit_plotdata(tmp.path()).unwrap();
    assert!(summary.written.is_empty());
    assert!(summary.skipped.is_empty());
    assert_eq!(fs::read_dir(tmp.path()).unwrap().count(), 0);
    let (code, _) = jumpfk(&["plotdata", "--run", tmp.path().to_str().unwrap(), "--quiet"]);
    assert_eq!(code, 0);
}

#[test]
fn plotdata_writes_bundles_for_finished_runs() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), &small_config());
    let out = tmp.path().join("runs");
    let s = run(Experiment::Stability, &cfg, &out, "s");
    let t = run(Experiment::Taylor, &cfg, &out, "t");
    fs::create_dir(out.join("not-a-run")).unwrap();

    let summary = emit_plotdata(&out).unwrap();
    assert_eq!(summary.skipped, vec![out.join("not-a-run")]);
    for f in ["log_norm.csv", "envelope.csv"] {
        assert!(s.dir.join("plot").join(f).is_file(), "{f}");
    }
    for f in ["taylor_bound.csv", "k1_bound.csv"] {
        assert!(t.dir.join("plot").join(f).is_file(), "{f}");
    }
    let env = fs::read_to_string(s.dir.join("plot/envelope.csv")).unwrap();
    let mut lines = env.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,ln_deviation,envelope_low,envelope_high"
    );
    assert_eq!(lines.count(), 5);

    // a single run directory is accepted too
    let again = emit_plotdata(&t.dir).unwrap();
    assert_eq!(again.written.len(), 2);
}

#[test]
fn plotdata_rejects_a_missing_directory() {
    let tmp = TempDir::new().unwrap();
    let (code, _) = jumpfk(&[
        "plotdata",
        "--run",
        tmp.path().join("absent").to_str().unwrap(),
        "--quiet",
    ]);
    assert_eq!(code, 2);
}
