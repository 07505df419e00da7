use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn valmono(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_valmono")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn epsilon_of_the_key() {
    let out = valmono(&["epsilon", "--spec", "keyed", "--poly", "z^2 - x^2*y"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["epsilon"], "(1, -1 - pi)");
    assert_eq!(v["b"], 1);
}

#[test]
fn constants_have_value_zero() {
    let out = valmono(&["eval", "--spec", "keyed", "--poly", "1"]);
    assert_eq!(json_of(&out)["value"], "(0, 0)");
    let out = valmono(&["eval", "--spec", "weights", "--poly", "x*y"]);
    assert_eq!(json_of(&out)["value"], "1 + 2*pi");
}

#[test]
fn inline_spec() {
    let spec = r#"{"group":{"pi":"pi"},"vars":["x","y"],"x":"y","val":{"kind":"monomial","weights":{"x":"1","y":"pi"}}}"#;
    let out = valmono(&["eval", "--spec", spec, "--poly", "x + y"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json_of(&out)["value"], "1");
}

#[test]
fn selftest_passes() {
    let out = valmono(&["selftest", "--seed", "11"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(json_of(&out)["passed"], true);
}

#[test]
fn exit_codes() {
    assert_eq!(valmono(&["eval", "--spec", "keyed", "--poly", "z^2 +"]).status.code(), Some(2));
    assert_eq!(valmono(&["eval", "--spec", "{not json", "--poly", "z"]).status.code(), Some(2));
    assert_eq!(valmono(&["divide", "--spec", "weights", "--a", "1,0", "--b", "0,1,0"]).status.code(), Some(2));
    let bad = ["successor", "--spec", "keyed", "--key", "z", "--candidate", "z^2 - x*y", "--verify"];
    assert_eq!(valmono(&bad).status.code(), Some(3));
    let good = ["successor", "--spec", "keyed", "--key", "z", "--candidate", "z^2 - x^2*y", "--verify"];
    assert_eq!(valmono(&good).status.code(), Some(0));
    assert_eq!(valmono(&["puiseux", "--spec", "weights", "--key", "z^2 - x^2*y"]).status.code(), Some(3));
    assert_eq!(valmono(&["monomialize", "--spec", "keyed", "--poly", "z^2 - x^2*y", "--budget", "0"]).status.code(), Some(3));
}

#[test]
fn next_successor_is_binomial() {
    let out = valmono(&["successor", "--spec", "weights", "--key", "z", "--next"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["certificate"]["alpha"], 2);
    assert!(v["successor"].as_str().unwrap().contains("z^2"));
}

#[test]
fn divide_writes_a_replayable_trace() {
    let trace = scratch("divide.jsonl");
    let out = valmono(&["divide", "--spec", "weights", "--a", "2,0,1", "--b", "0,1,0", "--trace", trace.to_str().unwrap()]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["first_divides"], true);
    let lines: Vec<Value> = std::fs::read_to_string(&trace)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), v["trace"].as_array().unwrap().len());
    let g = valmono_core::group::ValueGroup::default();
    let report = valmono_core::blowup::verify_trace(&lines, &g);
    assert!(report.ok(), "{:?}", report.failures);
}

#[test]
fn dot_output() {
    let out = valmono(&["blowup-step", "--spec", "weights", "--center", "0,1", "--center", "0,2", "--format", "dot"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("digraph trace"));
    assert_eq!(text.matches("->").count(), 2);
}

#[test]
fn state_resumes() {
    let state = scratch("state.json");
    let s = state.to_str().unwrap();
    let first = valmono(&["monomialize", "--spec", "keyed", "--poly", "z^2 - x^2*y", "--state", s]);
    assert!(first.status.success());
    let blowups = json_of(&first)["blowups"].as_u64().unwrap();
    let second = valmono(&["monomialize", "--spec", "keyed", "--resume", s, "--poly", "z + x"]);
    assert!(second.status.success(), "{}", String::from_utf8_lossy(&second.stderr));
    assert!(json_of(&second)["blowups"].as_u64().unwrap() >= blowups);
}

#[test]
fn uniformize_orders_by_value() {
    let out = valmono(&["uniformize", "--spec", "weights", "--polys", r#"["x + y", "x"]"#]);
    let v = json_of(&out);
    assert_eq!(v["first_divides_all"], true);
    assert_eq!(v["certificates"].as_array().unwrap().len(), 2);
}
