use abc_sir::cli::{run, Cli};
use clap::Parser;
use serde_json::Value;
use std::path::Path;
use std::process::Command;

const SMALL: &str = r#"{
  "alpha": 0.9,
  "grid": {"nx": 4, "ny": 4},
  "time": {"t_final": 2, "tau": 0.02},
  "outputs": {"snapshot_times": [1, 2]}
}"#;

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn summary(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

fn lib_run(args: &[&str]) -> abc_sir::Result<Value> {
    let mut full = vec!["abc-sir"];
    full.extend_from_slice(args);
    run(Cli::try_parse_from(full).unwrap())
}

#[test]
fn simulate_writes_timeseries_heatmaps_and_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "small.json", SMALL);
    let out = tmp.path().join("run");
    let doc = lib_run(&[
        "simulate",
        "--config",
        &cfg,
        "--output",
        out.to_str().unwrap(),
        "--control",
        "0.2",
    ])
    .unwrap();
    assert_eq!(doc["status"], "ok");

    let csv = std::fs::read_to_string(out.join("timeseries.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "t,total_S,total_I,total_R,max_I,J_running");
    assert_eq!(lines.count(), 101);

    for name in ["S", "I", "R", "u"] {
        let pgm = std::fs::read_to_string(out.join("snapshots").join(format!("{name}_t002.00.pgm"))).unwrap();
        let mut rows = pgm.lines();
        assert_eq!(rows.next(), Some("P2"));
        assert_eq!(rows.next(), Some("4 4"));
        assert_eq!(rows.next(), Some("255"));
        assert_eq!(rows.count(), 4);
    }
    let s = summary(&out);
    assert_eq!(s["status"], "ok");
    assert_eq!(s["command"], "simulate");
    assert!(s["objective"]["total"].as_f64().unwrap() > 0.0);
}

#[test]
fn optimize_records_a_run_that_did_not_converge() {
    let tmp = tempfile::tempdir().unwrap();
    let text = SMALL.replacen('{', r#"{"fbs": {"max_iter": 1},"#, 1);
    let cfg = write_config(tmp.path(), "one.json", &text);
    let out = tmp.path().join("run");
    let doc = lib_run(&["optimize", "--config", &cfg, "--output", out.to_str().unwrap()]).unwrap();
    assert_eq!(doc["status"], "not_converged");
    let s = summary(&out);
    assert_eq!(s["status"], "not_converged");
    assert_eq!(s["converged"], false);
    assert_eq!(s["iterations"], 1);
    assert!(out.join("timeseries.csv").exists());
}

#[test]
fn integer_order_request_is_mapped_and_recorded() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "small.json", SMALL);
    let out = tmp.path().join("run");
    lib_run(&[
        "simulate",
        "--config",
        &cfg,
        "--alpha",
        "1",
        "--output",
        out.to_str().unwrap(),
    ])
    .unwrap();
    let s = summary(&out);
    assert_eq!(s["alpha"], 0.999);
    assert_eq!(s["alpha_requested"], 1.0);
}

#[test]
fn binary_reports_a_solver_failure_and_still_writes_the_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let text = SMALL.replacen('{', r#"{"solver": {"instability_bound": 10},"#, 1);
    let cfg = write_config(tmp.path(), "bad.json", &text);
    let out = tmp.path().join("run");
    let res = Command::new(env!("CARGO_BIN_EXE_abc-sir"))
        .args(["simulate", "--config", &cfg, "--output", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!res.status.success());
    let err: Value = serde_json::from_slice(&res.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "instability");
    let s = summary(&out);
    assert_eq!(s["status"], "failed");
    assert_eq!(s["error"]["kind"], "instability");
}

#[test]
fn binary_rejects_bad_usage_with_a_json_error() {
    let res = Command::new(env!("CARGO_BIN_EXE_abc-sir"))
        .args(["simulate", "--bogus"])
        .output()
        .unwrap();
    assert_eq!(res.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&res.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "usage");
}

#[test]
fn binary_points_at_the_broken_line_of_a_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "broken.json",
        "{\n  \"alpha\": 0.9,\n  \"grid\": {\"nx\": }\n}",
    );
    let res = Command::new(env!("CARGO_BIN_EXE_abc-sir"))
        .args(["simulate", "--config", &cfg])
        .output()
        .unwrap();
    assert_eq!(res.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&res.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "parse");
    assert!(err["error"]["message"].as_str().unwrap().contains("line 3"), "{err}");
}

#[test]
fn binary_evaluates_mittag_leffler() {
    let res = Command::new(env!("CARGO_BIN_EXE_abc-sir"))
        .args(["ml-eval", "--alpha", "0.5", "--z", "-1"])
        .output()
        .unwrap();
    assert!(res.status.success());
    let doc: Value = serde_json::from_slice(&res.stdout).unwrap();
    assert!((doc["value"].as_f64().unwrap() - 0.427_583_576_155_807).abs() < 1e-13);
}

#[test]
fn gradient_check_command_passes_on_a_small_grid() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "small.json", SMALL);
    let doc = lib_run(&["gradient-check", "--config", &cfg, "--directions", "3"]).unwrap();
    assert_eq!(doc["passed"], true);
    assert!(doc["max_relative_error"].as_f64().unwrap() < 1e-6);
}
