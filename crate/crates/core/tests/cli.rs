//! The `bogofisher` binary: exit codes, JSON documents and the CSV contract.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const SQUEEZER: &str = r#"{"builtin": "single_mode_squeezer", "k": 0, "modes": 1}"#;
const TWO_MODE: &str = r#"{"builtin": "two_mode_squeezer", "k": 0, "kprime": 1, "modes": 2}"#;

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, body).unwrap();
    path
}

fn run(args: &[&dyn AsRef<std::ffi::OsStr>]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bogofisher"));
    for a in args {
        cmd.arg(a);
    }
    cmd.output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn validate_builtin_squeezer() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(&dir, "m.json", SQUEEZER);
    let out = run(&[&"validate", &model]);
    assert_eq!(code(&out), 0);
    let doc = stdout_json(&out);
    assert_eq!(doc["valid"], true);
    assert_eq!(doc["vacuum_qfi"], 2.0);
}

#[test]
fn validate_rejects_asymmetric_beta_with_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(&dir, "m.json", r#"{"modes": 2, "beta1": [[0, 1, 1, 0]]}"#);
    let out = run(&[&"validate", &model]);
    assert_eq!(code(&out), 2);
    let err = stderr_json(&out);
    assert_eq!(err["error"], "validation");
    assert!(err["message"].as_str().unwrap().contains("beta1 symmetry constraint violated"));
}

#[test]
fn schema_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let dup = write(&dir, "dup.json", r#"{"modes": 1, "beta1": [[0, 0, 1, 0], [0, 0, 1, 0]]}"#);
    let out = run(&[&"validate", &dup]);
    assert_eq!(code(&out), 1);
    assert_eq!(stderr_json(&out)["error"], "schema");
    let garbage = write(&dir, "bad.json", "{not json");
    assert_eq!(code(&run(&[&"validate", &garbage])), 1);
    assert_eq!(code(&run(&[&"validate", &dir.path().join("missing.json")])), 1);
}

#[test]
fn usage_errors_exit_one_with_json() {
    let out = run(&[&"scan"]);
    assert_eq!(code(&out), 1);
    assert_eq!(stderr_json(&out)["error"], "usage");
    assert_eq!(code(&run(&[&"--help"])), 0);
}

#[test]
fn qfi_of_squeezed_vacuum() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(&dir, "m.json", SQUEEZER);
    let state = write(&dir, "s.json", r#"[{"occ": [0], "re": 1.0, "im": 0.0}]"#);
    let out = run(&[&"qfi", &model, &"--state", &state]);
    assert_eq!(code(&out), 0);
    let doc = stdout_json(&out);
    assert!((doc["qfi"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert_eq!(doc["closed_form"]["breakdown"]["vacuum"], 2.0);
}

#[test]
fn qfi_keep_excluding_populated_mode_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(&dir, "m.json", TWO_MODE);
    let state = write(&dir, "s.json", r#"[{"occ": [1, 1], "re": 1.0}]"#);
    let out = run(&[&"qfi", &model, &"--state", &state, &"--keep", &"0"]);
    assert_eq!(code(&out), 1);
    let err = stderr_json(&out);
    assert_eq!(err["error"], "support_outside_keep");
    assert_eq!(err["message"], "state support outside keep");
}

#[test]
fn qfi_reduced_on_vacuum_complement() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(&dir, "m.json", TWO_MODE);
    let state = write(&dir, "s.json", r#"[{"occ": [2, 0], "re": 1.0}]"#);
    let out = run(&[&"qfi", &model, &"--state", &state, &"--keep", &"0"]);
    assert_eq!(code(&out), 0);
    let doc = stdout_json(&out);
    let pure = doc["breakdown"]["pure"].as_f64().unwrap();
    let loss = doc["tracing_loss"].as_f64().unwrap();
    assert!((pure - 12.0).abs() < 1e-10);
    assert!((doc["qfi"].as_f64().unwrap() - (pure - loss)).abs() < 1e-12);
}

#[test]
fn state_normalization_is_enforced_at_load() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(&dir, "m.json", SQUEEZER);
    let nearly = write(&dir, "a.json", r#"[{"occ": [0], "re": 1.0000000002}]"#);
    assert_eq!(code(&run(&[&"qfi", &model, &"--state", &nearly])), 0);
    let off = write(&dir, "b.json", r#"[{"occ": [0], "re": 0.9}]"#);
    let out = run(&[&"qfi", &model, &"--state", &off]);
    assert_eq!(code(&out), 1);
    assert_eq!(stderr_json(&out)["error"], "not_normalized");
}

#[test]
fn scan_writes_the_squeezer_table() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(&dir, "m.json", SQUEEZER);
    let table = dir.path().join("table.csv");
    let out = run(&[&"scan", &model, &"--n", &"0..6", &"--out", &table]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let summary = stdout_json(&out);
    assert_eq!(summary["rows"], 7);
    assert_eq!(summary["subtract_vacuum"], true);

    let mut reader = csv::Reader::from_path(&table).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        ["n", "m", "qfi_closed", "qfi_perturb", "qfi_oracle", "tracing_loss", "validity_ratio", "cutoff", "oracle_err"]
    );
    let want = [2.0, 6.0, 14.0, 26.0, 42.0, 62.0, 86.0];
    for (record, w) in reader.records().zip(want) {
        let record = record.unwrap();
        for col in [2, 3, 4] {
            let v: f64 = record[col].parse().unwrap();
            assert!((v - w).abs() < 1e-5, "column {col}: {v} vs {w}");
        }
        assert_eq!(&record[1], "");
        assert!(record[2].ends_with("e+00") || record[2].ends_with("e+01"));
    }
}

#[test]
fn scan_csv_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(&dir, "m.json", TWO_MODE);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let res = run(&[&"scan", &model, &"--n", &"0..3", &"--partner", &"1", &"--m", &"0..2", &"--out", out]);
        assert_eq!(code(&res), 0);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn scan_to_stdout_and_vacuum_switch() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(&dir, "m.json", SQUEEZER);
    let out = run(&[&"scan", &model, &"--n", &"1..8", &"--no-oracle", &"--keep-vacuum-term"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 9);
    assert!(text.lines().nth(1).unwrap().starts_with("1,,6.000000000000e+00,6.000000000000e+00,,,"));
}

#[test]
fn scan_bad_range_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(&dir, "m.json", SQUEEZER);
    assert_eq!(code(&run(&[&"scan", &model, &"--n", &"5..2"])), 1);
}

#[test]
fn named_lists_four_states() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(&dir, "m.json", TWO_MODE);
    let out = run(&[&"named", &model, &"--n", &"4"]);
    assert_eq!(code(&out), 0);
    let doc = stdout_json(&out);
    let names: Vec<&str> = doc.as_array().unwrap().iter().map(|r| r["state"].as_str().unwrap()).collect();
    assert_eq!(names, ["product", "superposition", "entangled", "penalty"]);
    assert!((doc[0]["qfi"].as_f64().unwrap() - 164.0).abs() < 1e-9);
    assert_eq!(doc[0]["cutoff"], 8);
}

#[test]
fn optimize_reports_constraint_residual() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(&dir, "m.json", TWO_MODE);
    let support = write(&dir, "support.json", "[[2, 2], [3, 3], [4, 4]]");
    let out = run(&[&"optimize", &model, &"--support", &support, &"--avg-n", &"6", &"--max-iter", &"300"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    assert!(doc["constraint_residual"].as_f64().unwrap() < 1e-8);
    assert!((doc["avg_n"].as_f64().unwrap() - 6.0).abs() < 1e-8);
    assert_eq!(doc["amplitudes"].as_array().unwrap().len(), 3);

    let out = run(&[&"optimize", &model, &"--support", &support, &"--avg-n", &"12"]);
    assert_eq!(code(&out), 1);
    assert_eq!(stderr_json(&out)["error"], "infeasible");
}

#[test]
fn oracle_compare_agrees_and_budget_failures_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(&dir, "m.json", TWO_MODE);
    let state = write(&dir, "s.json", r#"[{"occ": [1, 1], "re": 0.6}, {"occ": [0, 2], "re": 0.0, "im": 0.8}]"#);
    let out = run(&[&"oracle-compare", &model, &"--state", &state]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["agree"], true);

    let out = run(&[&"oracle-compare", &model, &"--state", &state, &"--headroom", &"1"]);
    assert_eq!(code(&out), 3);
    assert_eq!(stderr_json(&out)["error"], "cutoff_headroom");
}

#[test]
fn oracle_compare_on_reduced_state() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(&dir, "m.json", TWO_MODE);
    let state = write(&dir, "s.json", r#"[{"occ": [0, 0], "re": 1.0}]"#);
    let out = run(&[&"oracle-compare", &model, &"--state", &state, &"--keep", &"0"]);
    assert_eq!(code(&out), 0);
    let doc = stdout_json(&out);
    assert!((doc["qfi_perturbative"].as_f64().unwrap() - 4.0).abs() < 1e-12);
    assert_eq!(doc["dtheta"], 1e-3);
}
