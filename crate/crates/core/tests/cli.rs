use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bridgelab(args: &[&str], env_out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bridgelab"));
    cmd.args(args).env_remove("BRIDGELAB_OUT");
    if let Some(dir) = env_out {
        cmd.env("BRIDGELAB_OUT", dir);
    }
    cmd.output().unwrap()
}

fn text(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn list_shows_every_experiment() {
    let o = bridgelab(&["list"], None);
    assert!(o.status.success());
    let t = text(&o);
    for name in ["verify-gc-moments", "probe-resolvent", "verify-window-convergence"] {
        assert!(t.contains(name), "{t}");
    }
    let o = bridgelab(&["list", "--json"], None);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 8);
    assert_eq!(v[0]["name"], "verify-brownian-bridge");
}

#[test]
fn schema_prints_columns() {
    let o = bridgelab(&["schema", "verify-gc-moments"], None);
    assert!(o.status.success());
    assert!(text(&o).contains("path_index, c, g_fine, g_coarse"));
    let o = bridgelab(&["schema", "nope"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn run_writes_reports_and_flags_override_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("probe.toml");
    fs::write(&cfg, "experiment = \"probe-resolvent\"\nseed = 5\n").unwrap();
    let out = dir.path().join("out");
    let o = bridgelab(
        &["run", cfg.to_str().unwrap(), "--seed", "9", "--out", out.to_str().unwrap()],
        None,
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(text(&o).lines().any(|l| l.starts_with("PASS  resolvent-slope")));
    let summary: Value = serde_json::from_str(&fs::read_to_string(out.join("probe-resolvent/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["config"]["seed"], 9);
    assert_eq!(summary["passed"], true);
    let csv = fs::read_to_string(out.join("probe-resolvent/resolvent_curves.csv")).unwrap();
    assert!(csv.starts_with("alpha,x,t,q\n") && csv.ends_with('\n'));
}

#[test]
fn out_dir_defaults_to_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("probe.toml");
    fs::write(&cfg, "experiment = \"probe-resolvent\"\n").unwrap();
    let o = bridgelab(&["run", cfg.to_str().unwrap()], Some(&dir.path().join("env-out")));
    assert!(o.status.success());
    assert!(dir.path().join("env-out/probe-resolvent/summary.json").exists());
}

#[test]
fn invalid_config_lists_every_problem_and_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(
        &cfg,
        "experiment = \"verify-gc-moments\"\nn_paths = 0\ncolour = 3\n[params]\nq = [-1.0]\n",
    )
    .unwrap();
    let o = bridgelab(&["run", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    for needle in ["colour", "n_paths", "params.q"] {
        assert!(err.contains(needle), "{needle} missing from: {err}");
    }
    assert!(!dir.path().join("verify-gc-moments").exists());
}

#[test]
fn failing_tests_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("probe.toml");
    // A tolerance of zero cannot be met by a fitted slope.
    fs::write(&cfg, "experiment = \"probe-resolvent\"\n[params]\ntolerance = 1e-12\n").unwrap();
    let o = bridgelab(&["run", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(text(&o).lines().any(|l| l.starts_with("FAIL")));
}
