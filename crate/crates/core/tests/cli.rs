use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_commonfix"))
}

fn write_config(dir: &Path, name: &str, json: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, json).unwrap();
    p
}

fn run(args: &[&str], config: &Path) -> Output {
    bin()
        .args(args)
        .arg("--config")
        .arg(config)
        .output()
        .unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

const PAIR: &str = r#"{
  "domain": {"interval": [0, 1]},
  "t": {"affine": {"scale": 0.5}},
  "T": {"interval_scaling": {"c": 0.5}},
  "params": {"lambda": 0.5}
}"#;

#[test]
fn suzuki_exit_codes() {
    let dir = TempDir::new().unwrap();
    let c = write_config(
        dir.path(),
        "c.json",
        r#"{"map": {"catalog": "suzuki"}, "condition": "C"}"#,
    );
    let out = run(&["check-conditions"], &c);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["satisfied"], true);

    let ne = write_config(
        dir.path(),
        "ne.json",
        r#"{"map": {"catalog": "suzuki"}, "condition": "nonexpansive"}"#,
    );
    let out = run(&["check-conditions"], &ne);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["satisfied"], false);
    assert!(!v["violations"].as_array().unwrap().is_empty());
}

#[test]
fn missing_fields_exit_two_with_path() {
    let dir = TempDir::new().unwrap();
    let cases = [
        ("check-conditions", r#"{"condition": "C"}"#, "map"),
        (
            "check-conditions",
            r#"{"map": {"catalog": "suzuki"}}"#,
            "condition",
        ),
        (
            "check-conditions",
            r#"{"map": {"catalog": "suzuki"}, "condition": "C_lambda"}"#,
            "params.lambda",
        ),
        (
            "check-conditions",
            r#"{"map": {"catalog": "suzuki"}, "condition": "E_mu"}"#,
            "params.mu",
        ),
        ("iterate", r#"{"map": {"catalog": "suzuki"}}"#, "start"),
        (
            "asymptotic-center",
            r#"{"domain": {"interval": [0, 1]}}"#,
            "sequence",
        ),
        ("asymptotic-center", r#"{"sequence": [0, 1]}"#, "domain"),
        ("check-commuting", r#"{"t": {"catalog": "suzuki"}}"#, "T"),
        (
            "solve-common",
            r#"{"domain": {"interval": [0, 1]}, "t": {"affine": {"scale": 0.5}}}"#,
            "T",
        ),
        ("check-conditions", r#"{"space": {"p": 2}}"#, "space"),
        ("check-conditions", r#"{"params": {"lamda": 1}}"#, "params"),
    ];
    for (k, (cmd, json, path)) in cases.iter().enumerate() {
        let cfg = write_config(dir.path(), &format!("bad{k}.json"), json);
        let out = run(&[cmd], &cfg);
        assert_eq!(out.status.code(), Some(2), "{cmd} {json}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(
            err.contains(&format!("config error at `{path}")),
            "{cmd} {json}: {err}"
        );
    }
}

#[test]
fn no_config_is_usage_error() {
    let out = bin().arg("iterate").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_common_is_deterministic_across_threads() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "pair.json", PAIR);
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let traces = dir.path().join(format!("traces{threads}"));
        let out = bin()
            .args(["solve-common", "--seed", "7", "--threads", threads])
            .arg("--config")
            .arg(&cfg)
            .arg("--trace-dir")
            .arg(&traces)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        let outer = fs::read(traces.join("outer.csv")).unwrap();
        let inner = fs::read(traces.join("inner.csv")).unwrap();
        outputs.push((out.stdout, outer, inner));
    }
    assert_eq!(outputs[0], outputs[1]);
    let v: Value = serde_json::from_slice(&outputs[0].0).unwrap();
    assert!(v["z"].as_array().unwrap()[0].as_f64().unwrap().abs() <= 1e-6);
    let header = String::from_utf8_lossy(&outputs[0].1);
    assert!(header.starts_with("n,x,y,residual\n"));
}

#[test]
fn check_conditions_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "g.json",
        r#"{"map": {"catalog": "garcia", "lambda": 0.5}, "condition": "C_lambda", "params": {"lambda": 0.25}}"#,
    );
    let a = bin()
        .args(["check-conditions", "--seed", "3", "--threads", "1"])
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap();
    let b = bin()
        .args(["check-conditions", "--seed", "3", "--threads", "3"])
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(a.status.code(), Some(1));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn iterate_writes_trace() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "mv.json",
        r#"{"map": {"catalog": "mv5"}, "start": 5, "params": {"step": 0.5, "tol": 1e-6, "rule": "to-x"}}"#,
    );
    let traces = dir.path().join("t");
    let out = bin()
        .arg("iterate")
        .arg("--config")
        .arg(&cfg)
        .arg("--trace-dir")
        .arg(&traces)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(traces.join("trace.csv")).unwrap();
    let rows = csv.lines().count() - 1;
    let v = stdout_json(&out);
    assert_eq!(v["iterations"].as_u64().unwrap() as usize + 1, rows);
    assert_eq!(v["recurrence_verified"], true);
}

#[test]
fn commuting_abort_reports_witness() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "one.json",
        r#"{
          "domain": {"interval": [0, 1]},
          "t": {"affine": {"scale": 0.5}},
          "T": {"constant_set": {"interval": [1, 1]}},
          "params": {"lambda": 0.5}
        }"#,
    );
    let out = run(&["solve-common"], &cfg);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["status"], "aborted");
    assert_eq!(v["stage"], "commuting");
    assert_eq!(v["witness"]["x"][0], 1.0);
}

#[test]
fn suite_writes_json_when_asked() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("suite.json");
    let out = bin()
        .arg("reproduce-paper")
        .arg("--out")
        .arg(&out_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["checks"].as_array().unwrap().len(), 9);
}
