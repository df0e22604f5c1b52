use std::path::PathBuf;
use std::process::{Command, Output};

use limitset::subset_nets::SubsetNet;
use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_limitset-lab"));
    c.env_remove("LIMITSET_THREADS");
    c
}

fn example(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn assert_one_line_error(out: &Output) {
    assert_eq!(out.status.code(), Some(2), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(err.trim_end().lines().count(), 1, "diagnostic: {err:?}");
    assert!(out.stdout.is_empty());
}

#[test]
fn escape_net_has_empty_limit_set_and_is_not_lagrange_stable() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("analysis.json");
    let out = run(&["net", "analyze", "--in", example("escape.json").to_str().unwrap(), "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["analysis"]["limit_set"], serde_json::json!([]));
    assert_eq!(v["analysis"]["lagrange_stable"]["state"], "fails");
    assert_eq!(v["oracle"]["agrees"], true);
}

#[test]
fn trap_and_spiral_verdicts() {
    let trap = stdout_json(&run(&["net", "analyze", "--in", example("trap.json").to_str().unwrap()]));
    for key in ["limit_set_compact", "asympt_seq_compact", "weakly_asympt_seq_compact", "lagrange_stable"] {
        assert_eq!(trap["analysis"][key]["state"], "fails", "{key}");
    }
    let spiral = stdout_json(&run(&["net", "analyze", "--in", example("spiral.json").to_str().unwrap()]));
    assert_eq!(spiral["analysis"]["lagrange_stable"]["state"], "holds");
    assert_eq!(spiral["analysis"]["limit_set"], serde_json::json!([[{"num": "1", "den": "1"}, {"num": "0", "den": "1"}]]));
}

#[test]
fn emitted_json_round_trips() {
    for name in ["escape.json", "spiral.json", "trap.json", "alternating.json"] {
        let out = run(&["net", "analyze", "--in", example(name).to_str().unwrap(), "--horizon", "128"]);
        assert_eq!(out.status.code(), Some(0), "{name}");
        let text = String::from_utf8(out.stdout).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", text, "{name}");

        let original = SubsetNet::from_json(&std::fs::read_to_string(example(name)).unwrap()).unwrap();
        let echoed = SubsetNet::from_json(&v["net"].to_string()).unwrap();
        assert_eq!(original, echoed, "{name}");
    }
}

#[test]
fn space_check_reports_requested_properties() {
    let v = stdout_json(&run(&["space", "check", "--in", example("sierpinski.json").to_str().unwrap()]));
    assert_eq!(v, serde_json::json!({"n": 2, "hausdorff": false, "regular": false, "pseudometrizable": false}));
    let v = stdout_json(&run(&[
        "space",
        "check",
        "--props",
        "regular,pseudometrizable",
        "--in",
        example("metric4.json").to_str().unwrap(),
    ]));
    assert_eq!(v, serde_json::json!({"n": 4, "regular": true, "pseudometrizable": true}));
}

#[test]
fn rotation_by_an_eighth_cycles_through_every_cell() {
    let dir = tempfile::tempdir().unwrap();
    let summary = dir.path().join("omega.json");
    let out = run(&[
        "omega",
        "--map",
        "rotation",
        "--param",
        "0.125",
        "--cells",
        "8",
        "--init",
        "cell:0",
        "--omega-out",
        summary.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    let mut rows = csv.lines();
    assert_eq!(rows.next(), Some("n,cardinality,distance"));
    assert_eq!(rows.count(), 9);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(summary).unwrap()).unwrap();
    assert_eq!(v["omega"], serde_json::json!([0, 1, 2, 3, 4, 5, 6, 7]));
    assert_eq!(v["period"], 8);
    assert_eq!(v["preperiod"], 0);
    assert_eq!(v["attraction_trace_ok"], true);
}

#[test]
fn logistic_trace_reaches_zero_at_the_preperiod() {
    let out = run(&["omega", "--map", "logistic", "--param", "2", "--cells", "64", "--init", "cells:20,40"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    let last = csv.lines().last().unwrap();
    assert!(last.ends_with(",0"), "{csv}");
}

#[test]
fn input_errors_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"ground\": ").unwrap();
    assert_one_line_error(&run(&["net", "analyze", "--in", bad.to_str().unwrap()]));
    assert_one_line_error(&run(&["net", "analyze", "--in", dir.path().join("missing.json").to_str().unwrap()]));
    assert_one_line_error(&run(&["net", "analyze", "--in", example("escape.json").to_str().unwrap(), "--horizon", "4"]));
    assert_one_line_error(&run(&["omega", "--map", "logistic", "--param", "4.5"]));
    assert_one_line_error(&run(&["omega", "--map", "tent"]));
    assert_one_line_error(&run(&["omega", "--map", "logistic", "--param", "2", "--cells", "12"]));
    assert_one_line_error(&run(&["omega", "--map", "logistic", "--param", "2", "--init", "cell:64"]));
    assert_one_line_error(&run(&["omega", "--map", "logistic", "--param", "2", "--dim", "2"]));
    assert_one_line_error(&run(&["verify", "--suite", "nope"]));
    assert_one_line_error(&run(&["space", "check", "--props", "compact", "--in", example("sierpinski.json").to_str().unwrap()]));
    assert_one_line_error(&run(&["frobnicate"]));
    assert_one_line_error(&run(&["verify", "--budget", "lots"]));

    let neg = dir.path().join("neg.json");
    std::fs::write(&neg, r#"{"n": 2, "dist": [[0, -1], [-1, 0]]}"#).unwrap();
    assert_one_line_error(&run(&["space", "check", "--in", neg.to_str().unwrap()]));
}

#[test]
fn thread_cap_must_be_positive() {
    let out = bin()
        .env("LIMITSET_THREADS", "zero")
        .args(["verify", "--suite", "pseudometrizable_equivalence", "--budget", "10"])
        .output()
        .unwrap();
    assert_one_line_error(&out);
}

#[test]
fn verify_output_is_independent_of_thread_count() {
    let args = ["verify", "--suite", "semidistance_criteria", "--budget", "200", "--seed", "7", "--out", "-"];
    let default = run(&args);
    let single = bin().env("LIMITSET_THREADS", "1").args(args).output().unwrap();
    let double = bin().env("LIMITSET_THREADS", "2").args(args).output().unwrap();
    assert_eq!(default.status.code(), Some(0));
    assert_eq!(default.stdout, single.stdout);
    assert_eq!(default.stdout, double.stdout);
    let v: Value = serde_json::from_slice(&default.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["suites"][0]["suite"], "semidistance_criteria");
    assert!(v["suites"][0].get("elapsed").is_none());
}

#[test]
fn verify_writes_report_file_and_summary_lines() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run(&["verify", "--suite", "pseudometrizable_equivalence", "--budget", "50", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("pseudometrizable_equivalence"));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["suites"][0]["instances"], 50);
    assert_eq!(v["suites"][0]["counters"]["traps"], 10);
}
