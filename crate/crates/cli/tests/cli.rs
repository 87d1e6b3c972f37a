use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn inls(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_inls"))
        .args(args)
        .output()
        .expect("inls runs")
}

fn report(dir: &std::path::Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn malformed_rational_is_usage_error() {
    let out = inls(&["admissible", "--beta", "2/x"]);
    assert_eq!(out.status.code(), Some(2));
    let out = inls(&["admissible", "--alpha", "1/0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_config_is_usage_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("c.json");
    std::fs::write(&cfg, r#"{"params": {"beta": "two"}}"#).unwrap();
    let out = inls(&["admissible", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::write(&cfg, r#"{"sample": 3}"#).unwrap();
    let out = inls(&["admissible", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn admissible_report_layout() {
    let tmp = TempDir::new().unwrap();
    let out = inls(&[
        "admissible", "--mode", "l2", "--d", "3", "--alpha", "1", "--beta", "2/3", "--n", "50",
        "--out", tmp.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let r = report(tmp.path());
    for key in ["params", "triple", "dual", "thetas", "checks", "verdict"] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
    assert_eq!(r["params"]["beta"], "2/3");
    assert_eq!(r["measurements"]["dual_failures"], 0.0);
    assert!(r.get("runtime_ms").is_none());
    let csv = std::fs::read_to_string(tmp.path().join("triples.csv")).unwrap();
    assert_eq!(csv.lines().count(), 51);
}

#[test]
fn critical_hs_power_has_zero_theta1() {
    let out = inls(&[
        "admissible", "--mode", "hs", "--d", "3", "--alpha", "3/2", "--beta", "5/14", "--s",
        "1/10", "--n", "20",
    ]);
    assert!(out.status.success());
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["thetas"]["theta1"], "0");
}

#[test]
fn config_file_and_flags_merge() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("c.json");
    std::fs::write(&cfg, r#"{"samples": 5, "params": {"alpha": "1/2"}}"#).unwrap();
    let out = inls(&["admissible", "--config", cfg.to_str().unwrap(), "--beta", "1/2", "--seed", "11"]);
    assert!(out.status.success());
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["config"]["samples"], 5);
    assert_eq!(r["params"]["alpha"], "1/2");
    assert_eq!(r["params"]["beta"], "1/2");
    assert_eq!(r["seed"], 11);
}

#[test]
fn solver_failure_is_reported_not_fatal() {
    let tmp = TempDir::new().unwrap();
    let out = inls(&[
        "solve", "--lambda", "-1", "--points", "16", "--half-length", "8", "--norm", "50",
        "--final-time", "5", "--steps", "8", "--method", "picard",
        "--out", tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(tmp.path());
    let status = r["picard"]["status"].as_str().unwrap();
    assert!(status == "no_convergence" || status == "blow_up", "{status}");
    assert_eq!(r["verdict"]["picard_converged"], false);
}

#[test]
fn trajectory_dump_matches_header() {
    let tmp = TempDir::new().unwrap();
    let out = inls(&[
        "solve", "--points", "8", "--half-length", "4", "--steps", "8", "--method", "splitstep",
        "--dump", "--out", tmp.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let bytes = std::fs::read(tmp.path().join("traj.bin")).unwrap();
    let nl = bytes.iter().position(|&b| b == b'\n').unwrap();
    let header: Value = serde_json::from_slice(&bytes[..nl]).unwrap();
    assert_eq!(header["solver"], "splitstep");
    assert_eq!(header["snapshots"], 9);
    assert_eq!(bytes.len() - nl - 1, 9 * 8usize.pow(3) * 16);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let run = |name: &str| {
        let dir = tmp.path().join(name);
        let out = inls(&[
            "solve", "--points", "16", "--half-length", "8", "--steps", "8", "--seed", "5",
            "--dump", "--out", dir.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        ["report.json", "mass.csv", "increments.csv", "traj.bin"]
            .map(|f| std::fs::read(dir.join(f)).unwrap())
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn failed_verdict_exits_nonzero() {
    let out = inls(&["scatter", "--set", "threshold=1e-12", "--final-time", "1", "--steps", "8"]);
    assert_eq!(out.status.code(), Some(1));
}
