mod common;

use std::process::{Command, Output};

use serde_json::Value;

use common::fan_path;

fn qdm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdm")).args(args).output().expect("binary runs")
}

fn run_json(cmd: &str, fan: &str, extra: &[&str]) -> Value {
    let path = fan_path(fan).display().to_string();
    let mut args = vec![cmd, path.as_str()];
    args.extend_from_slice(extra);
    let out = qdm(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn degrees(report: &Value) -> Vec<Value> {
    report["series"].as_array().unwrap().iter().map(|e| e["degree"].clone()).collect()
}

#[test]
fn cohomology_dimensions() {
    let p2 = run_json("cohomology", "p2", &[]);
    assert_eq!(p2["graded_dimensions"], serde_json::json!([1, 1, 1]));
    let p1 = run_json("cohomology", "p1", &[]);
    assert_eq!(p1["graded_dimensions"], serde_json::json!([1, 1]));
    assert_eq!(p1["checks"]["pairing_nonsingular"], Value::Bool(true));
}

#[test]
fn invalid_fan_exits_with_diagnostic() {
    let dir = std::env::temp_dir().join(format!("qdm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, r#"{"rays": [[2, 0], [0, 1], [-1, -1]], "max_cones": [[0, 1], [1, 2], [0, 2]]}"#).unwrap();
    let out = qdm(&["cohomology", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not primitive"));

    let missing = qdm(&["cohomology", dir.join("absent.json").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn ifunction_degrees() {
    let p2 = run_json("ifunction", "p2", &["--max-degree", "6"]);
    assert_eq!(degrees(&p2), vec![serde_json::json!([0]), serde_json::json!([1]), serde_json::json!([2])]);
    // R_1 = (w + h)^-3 = h^-3 - 3 w h^-4 + 6 w^2 h^-5
    let r1 = &p2["series"][1]["terms"];
    assert_eq!(r1, &serde_json::json!([
        {"hbar": -5, "class": {"w1^2": "6"}},
        {"hbar": -4, "class": {"w1": "-3"}},
        {"hbar": -3, "class": {"1": "1"}},
    ]));

    let zero = run_json("ifunction", "p2", &["--max-degree", "0"]);
    assert_eq!(degrees(&zero), vec![serde_json::json!([0])]);
}

#[test]
fn ifunction_sign_gate() {
    let path = fan_path("f1").display().to_string();
    let out = qdm(&["ifunction", &path, "--max-degree", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("general-sign"));

    let f1 = run_json("ifunction", "f1", &["--max-degree", "4", "--allow-general-sign"]);
    let ds = degrees(&f1);
    assert!(ds.len() > 3);
    assert!(ds.iter().all(|d| d.as_array().unwrap().len() == 2));
    assert_eq!(f1["checks"]["homogeneity_violations"], 0);
}

#[test]
fn ifunction_components() {
    let p1 = run_json("ifunction", "p1", &["--max-degree", "4", "--components"]);
    let comps = p1["components"].as_array().unwrap();
    assert_eq!(comps.len(), 2);
    // the w1 component starts with L1 / hbar
    let first = &comps[1]["entries"][0];
    assert_eq!(first["degree"], serde_json::json!([0]));
    assert_eq!(first["terms"], serde_json::json!([{"logs": {"L1": 1}, "hbar": -1, "coeff": "1"}]));
}

#[test]
fn operators_for_projective_plane() {
    let r = run_json("operators", "p2", &[]);
    assert_eq!(r["gkz"][0]["display"], "theta1^3 - q1");
    assert_eq!(r["gkz"][0]["relation"], "p1^3 - q1");
    assert_eq!(r["gkz"][0]["annihilates"], true);
    assert_eq!(r["gkz"][0]["in_annihilator_span"], true);
}

#[test]
fn operators_for_product_of_lines() {
    let r = run_json("operators", "p1xp1", &[]);
    let rels: Vec<&str> = r["gkz"].as_array().unwrap().iter().map(|g| g["relation"].as_str().unwrap()).collect();
    assert_eq!(rels, vec!["p2^2 - q2", "p1^2 - q1"]);
}

#[test]
fn operators_with_zero_bounds() {
    let r = run_json("operators", "p2", &["--theta-order", "0", "--q-degree", "0", "--hbar-order", "0"]);
    assert_eq!(r["annihilators"], serde_json::json!([]));
}

#[test]
fn loop_model_reports() {
    let r = run_json("loop-model", "p2", &["--degree", "1", "--modes", "0..3"]);
    let rep = &r["reports"][0];
    assert_eq!(rep["stable"], true);
    assert_eq!(rep["absent"], serde_json::json!([0]));
    assert_eq!(rep["N_list"], serde_json::json!([0, 1, 2, 3]));
    assert_eq!(rep["critical_value"], "1");

    let path = fan_path("p2").display().to_string();
    let out = qdm(&["loop-model", &path, "--degree", "1,0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn text_format_and_output_file() {
    let dir = std::env::temp_dir().join(format!("qdm-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let target = dir.join("report.txt");
    let path = fan_path("p2").display().to_string();
    let out = qdm(&["cohomology", &path, "--format", "text", "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&target).unwrap();
    assert!(text.contains("graded_dimensions: [1, 1, 1]"));
}

#[test]
fn identical_runs_are_byte_identical() {
    let path = fan_path("p1xp1").display().to_string();
    for cmd in ["cohomology", "ifunction", "operators", "loop-model"] {
        let a = qdm(&[cmd, &path]);
        let b = qdm(&[cmd, &path]);
        assert_eq!(a.stdout, b.stdout, "{cmd}");
    }
}
