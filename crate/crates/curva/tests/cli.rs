//! The command-line tool, driven through the built binary.

mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

use common::corpus_dir;

fn curva(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curva")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

/// A scratch directory unique to one test.
fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("curva-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn corpus_file(name: &str) -> String {
    corpus_dir().join(format!("{name}.json")).to_string_lossy().into_owned()
}

#[test]
fn corpus_round_trips_and_replays() {
    let out = curva(&["corpus", corpus_dir().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    let entries = report["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 9);
    for e in entries {
        assert_eq!(e["round_trip"], Value::Bool(true), "{}", e["file"]);
        assert!(e["normal_form"]["normal_form"]["psi"].is_object(), "{}", e["file"]);
    }
}

#[test]
fn reports_are_reproducible() {
    let a = curva(&["normal-form", &corpus_file("nm23_pair")]);
    let b = curva(&["normal-form", &corpus_file("nm23_pair")]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let report = stdout_json(&a);
    assert_eq!(report["input"], serde_json::from_str::<Value>(&std::fs::read_to_string(corpus_file("nm23_pair")).unwrap()).unwrap());
}

#[test]
fn invariants_of_the_cusp() {
    let report = stdout_json(&curva(&["invariants", &corpus_file("cusp")]));
    assert_eq!(report["kappa"], serde_json::json!([2]));
    assert_eq!(report["determinacy"], serde_json::json!([4]));
    assert_eq!(report["Gamma"]["box"], serde_json::json!([[0], [2], [3], ["inf"]]));
}

#[test]
fn inequivalent_cusps_exit_with_two() {
    let dir = scratch("cusps");
    let a = write(&dir, "a.json", r#"{"branches":[{"x":[[2,"1","0"]],"y":[[3,"1","0"]],"trunc":10}]}"#);
    let b = write(&dir, "b.json", r#"{"branches":[{"x":[[2,"1","0"]],"y":[[5,"1","0"]],"trunc":10}]}"#);
    let out = curva(&["equivalent", &a, &b]);
    assert_eq!(out.status.code(), Some(2));
    let report = stdout_json(&out);
    assert_eq!(report["equivalent"], Value::Bool(false));
    assert_eq!(report["distinguisher"], "Gamma");
}

#[test]
fn equivalent_germs_carry_a_verified_certificate() {
    let dir = scratch("zariski");
    let moved = write(&dir, "moved.json", r#"{"branches":[{"x":[[4,"1","0"]],"y":[[6,"1","0"],[7,"3","0"]],"trunc":18}]}"#);
    let out = curva(&["equivalent", &corpus_file("zariski"), &moved]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["equivalent"], Value::Bool(true));
    assert_eq!(report["certificate_verified"], Value::Bool(true));
}

#[test]
fn moduli_dimension_of_four_cusps() {
    let out = curva(&["moduli-dim", "--class", "nm", "--n", "2", "--m", "3", "--r", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["dimension"], 11);
    assert_eq!(report["agreement"], Value::Bool(true));
}

#[test]
fn out_flag_writes_the_report() {
    let dir = scratch("out");
    let target = dir.join("report.json");
    let out = curva(&["invariants", "--no-lambda-g", &corpus_file("node"), "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(report["kappa"], serde_json::json!([1, 1]));
}

#[test]
fn bad_input_is_a_validation_error() {
    let dir = scratch("bad");
    let doubled = write(&dir, "doubled.json", r#"{"branches":[{"x":[[4,"1","0"]],"y":[[6,"1","0"]],"trunc":18}]}"#);
    let out = curva(&["invariants", &doubled]);
    assert_eq!(out.status.code(), Some(4));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "validation");

    let missing = curva(&["moduli-dim", "--class", "nm", "--n", "2"]);
    assert_eq!(missing.status.code(), Some(4));
}
