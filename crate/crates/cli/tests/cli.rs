use std::fs;
use std::process::{Command, Output};

fn dioph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dioph")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn list_is_stable() {
    let a = dioph(&["list"]);
    assert!(a.status.success());
    let text = String::from_utf8(a.stdout).unwrap();
    assert_eq!(text, "corollary\ntheoremA-comparison\n");
}

#[test]
fn check_reports_verdicts_and_exit_code() {
    let out = dioph(&["check", "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["verdicts"][0]["hypothesis"], "condition1(delta=3/5)");
    assert_eq!(v["verdicts"][0]["verdict"], "satisfied-on-window");
    assert_eq!(v["verdicts"][1]["verdict"], "violated-at(5)");
}

#[test]
fn delta_override_applies_to_hypotheses() {
    let out = dioph(&["check", "--delta", "1/100", "--format", "json"]);
    let v = json(&out);
    assert_eq!(v["verdicts"][0]["hypothesis"], "condition1(delta=1/100)");
    assert_eq!(v["verdicts"][1]["hypothesis"], "theoremA(delta=1/100)");
}

#[test]
fn converge_table_values() {
    let out = dioph(&["converge", "--window", "1..3", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let rows = v["convergents"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[2]["p"], "392");
    assert_eq!(rows[2]["q"], "512");
    assert_eq!(rows[2]["delta_n"]["delta"], "1.000000");
    assert_eq!(rows[5]["p"], "528");
}

#[test]
fn subspace_instance_at_three() {
    let out = dioph(&["subspace", "--window", "3..3", "--delta", "1/2", "--format", "json"]);
    let v = json(&out);
    let row = &v["subspace"][0];
    assert_eq!(row["height"], "528");
    assert!(row["delta_prime_max"].as_str().unwrap().starts_with("0.8198"));
    assert_eq!(row["forms_inequality"][0]["holds"], true);
}

#[test]
fn relations_and_probe() {
    let out = dioph(&["relations", "--bound", "2", "--precision", "64", "--window", "1..6", "--probe", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["relations"]["candidates"].as_array().unwrap().len(), 0);
    assert_eq!(v["probe"]["refuted"], 124);
    assert_eq!(v["probe"]["witness"]["n2"], 4);
}

#[test]
fn scenario_reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = dioph(&["scenario", "corollary", "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(1));
        assert!(out.stdout.is_empty());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn invalid_config_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, "name = \"bad\"\nwindow = \"1..8\"\n[series]\nmode = \"sum-direct\"\ndenominators = \"power(2)\"\ncoefficients = [\"nope\"]\n").unwrap();
    let out = dioph(&["scenario", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("series.coefficients[0]"), "{err}");
    assert_eq!(dioph(&["scenario", "no-such-scenario"]).status.code(), Some(2));
    assert_eq!(dioph(&["check", "--window", "1..2"]).status.code(), Some(2));
}

#[test]
fn refusals_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("flat.toml");
    // Constant denominators admit no ratio certificate, so exponents are refused.
    fs::write(&path, "name = \"flat\"\nwindow = \"1..4\"\n[series]\nmode = \"sum-direct\"\ndenominators = \"constant(2)\"\ncoefficients = [\"constant(1)\"]\n").unwrap();
    let out = dioph(&["converge", "--config", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(3));
    let v = json(&out);
    assert!(!v["refusals"].as_array().unwrap().is_empty());
    assert_eq!(v["convergents"][0]["p"], "1");
}

#[test]
fn table_format_is_readable() {
    let out = dioph(&["scenario", "theoremA-comparison", "--format", "table"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("(b_1..b_N)^(1+delta) <= b_(N+1)"));
    assert!(text.contains("holds for every N"));
    assert!(text.contains("fails at N"));
}
