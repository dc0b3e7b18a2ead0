//! Exit codes and output formats of the command line.

use std::process::{Command, Output};

use specdet::matmodel::{write_matrix, MatrixOperator};
use specdet::verify::read_csv;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_specdet")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn verify_small_run_passes() {
    let o = run(&["verify", "--suite", "standard-inequalities", "--n", "8", "--trials", "5", "--seed", "1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_csv(o.stdout.as_slice()).unwrap();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.pass && r.n == 8 && r.check_name.starts_with("standard-inequalities:")));
}

#[test]
fn unknown_suite_prints_menu() {
    let o = run(&["verify", "--suite", "no-such-suite"]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("main-product") && err.contains("det-multiplicativity"), "{err}");
}

#[test]
fn bad_flags_exit_two() {
    for args in [
        vec!["verify", "--n", "1"],
        vec!["verify", "--n", "513"],
        vec!["verify", "--n", "abc"],
        vec!["verify", "--format", "xml"],
        vec!["verify", "--tol", "-1"],
        vec!["frobnicate"],
        vec!["det", "--input", "kind=nope"],
        vec!["det", "--input", "psi-prime", "--trace", "integral:-1"],
        vec!["det", "--input", "psi-prime", "--space", "l0"],
    ] {
        assert_eq!(code(&run(&args)), 2, "{args:?}");
    }
}

#[test]
fn zero_trials_is_no_data() {
    let o = run(&["verify", "--trials", "0", "--format", "json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["status"], "no-data");
}

#[test]
fn json_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let o = run(&[
        "verify", "--suite", "sum-pos,tpm-vanishing", "--n", "6", "--trials", "2", "--format", "json", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["status"], "pass");
    let names: Vec<&str> = v["reports"].as_array().unwrap().iter().map(|r| r["check_name"].as_str().unwrap()).collect();
    assert_eq!(names, ["sum-pos", "tpm-vanishing"]);
}

#[test]
fn thread_cap_does_not_change_rows() {
    let args = ["verify", "--suite", "commutator", "--n", "8", "--trials", "4", "--seed", "9"];
    let a = run(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_specdet")).args(args).env("SPECDET_THREADS", "1").output().unwrap();
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let bad = Command::new(env!("CARGO_BIN_EXE_specdet")).args(args).env("SPECDET_THREADS", "zero").output().unwrap();
    assert_eq!(code(&bad), 2);
}

#[test]
fn det_identity_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("id.txt");
    std::fs::write(&path, write_matrix(&MatrixOperator::identity(4))).unwrap();
    for space in ["l1", "l2", "linf", "llog"] {
        let o = run(&["det", "--input", path.to_str().unwrap(), "--trace", "integral:1", "--space", space]);
        assert_eq!(code(&o), 0);
        let v = json(&o);
        assert_eq!(v["value"], 1.0);
        assert_eq!(v["branch_taken"], 1);
        assert_eq!(v["eps_limit"], serde_json::Value::Null);
    }
}

#[test]
fn det_singular_matrix_takes_kernel_branch() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.txt");
    std::fs::write(&path, write_matrix(&MatrixOperator::from_real_diagonal(&[2.0, 0.0, 5.0]).unwrap())).unwrap();
    let o = run(&["det", "--input", path.to_str().unwrap(), "--trace", "integral:1"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["value"], 0.0);
    assert_eq!(v["branch_taken"], 3);
}

#[test]
fn det_invertible_profile_with_eps_limit() {
    let o = run(&[
        "det", "--input", "kind=exp-neg-psi-prime-flip", "--trace", "singular:psi-log", "--space",
        "marcinkiewicz:psi-log", "--eps-compare",
    ]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let e1 = (-1f64).exp();
    assert!((v["value"].as_f64().unwrap() - e1).abs() <= 1e-9 * e1);
    assert_eq!(v["branch_taken"], 1);
    assert_eq!(v["eps_limit"]["converged"], 1.0);
}

#[test]
fn det_outside_domain_reports_reason() {
    // log₊μ = t^{-1}log(e/t)^{-1} is not in the Marcinkiewicz space
    let o = run(&["det", "--input", "kind=exp-power a=1 b=-1", "--trace", "singular:psi-log", "--space", "marcinkiewicz"]);
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(code(&o), 1, "{err}");
    assert!(o.stdout.is_empty());
    assert!(err.contains("not in E_log"), "{err}");
}

#[test]
fn examples_reproduce() {
    for name in ["ex-3-4-invertible", "ex-3-4-projection", "prop-3-2"] {
        let o = run(&["example", "--name", name]);
        assert_eq!(code(&o), 0, "{name}");
        let v = json(&o);
        assert_eq!(v["pass"], true);
        assert_eq!(v["name"], name);
    }
    assert_eq!(code(&run(&["example", "--name", "ex-9-9"])), 2);
}
