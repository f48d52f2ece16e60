use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use catalytic_erasure::cli::CSV_HEADER;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_catalytic-erasure"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin().args(args).current_dir(dir).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn sweep_writes_header_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["jc-sweep", "--grid", "0.2:0.5:4", "--t-policy", "max-erasure:200", "--deterministic"];
    let first = run(&[&args[..], &["--out", "a.csv"]].concat(), dir.path());
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stderr));
    let second = run(&[&args[..], &["--out", "b.csv"]].concat(), dir.path());
    assert_eq!(second.status.code(), Some(0));

    let a = fs::read(dir.path().join("a.csv")).unwrap();
    let b = fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
    assert_eq!(text.lines().count(), 5);

    let summary = json(&first);
    assert!(summary["peak"]["gamma_H"].as_f64().unwrap() > 0.0);
}

#[test]
fn sweep_rejects_empty_grid_without_writing() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["jc-sweep", "--grid", "0.2:0.5:0", "--out", "x.csv"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("x.csv").exists());
}

#[test]
fn catalyze_reports_loop_witness() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("s.txt"), "dims = 2 2\n0.30\n0.25\n0.35\n0.10\n").unwrap();
    let out = run(&["catalyze", "s.txt"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["status"], "ok");
    let tuples: Vec<Value> = v["witnesses"].as_array().unwrap().iter().map(|w| w["tuple"].clone()).collect();
    assert!(tuples.contains(&serde_json::json!([2, 1, 1, 2])));
    assert!(v["gamma_E"].as_f64().unwrap() > 0.0);
}

#[test]
fn catalyze_product_state_is_uncorrelated() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("p.txt"), "dims = 2 2\n0.42\n0.18\n0.28\n0.12\n").unwrap();
    let out = run(&["catalyze", "p.txt"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["status"], "uncorrelated");
}

#[test]
fn malformed_input_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.txt"), "dims = 2 2\n0.1\nabc\n0.4\n0.1\n").unwrap();
    let out = run(&["catalyze", "bad.txt"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn unknown_flag_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["catalyze", "--bogus"], dir.path()).status.code(), Some(2));
}

#[test]
fn qubit_pair_check_reports_swap() {
    let dir = tempfile::tempdir().unwrap();
    let x: f64 = (-1.4f64).exp();
    fs::write(dir.path().join("ps.txt"), "0.6\n0.4\n").unwrap();
    fs::write(dir.path().join("pe.txt"), format!("{}\n{}\n", 1.0 / (1.0 + x), x / (1.0 + x))).unwrap();
    let out = run(&["check-erasure", "ps.txt", "pe.txt"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["message"], "swap optimal, no catalytic gain");
}
