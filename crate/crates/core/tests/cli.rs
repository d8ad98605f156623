//! End-to-end runs of the command-line front end.

use std::fs;
use std::path::Path;
use xxzlab::cli::run;

fn run_args(args: &[&str]) -> i32 {
    run(std::iter::once("xxzlab").chain(args.iter().copied()))
}

fn run_to(dir: &Path, name: &str, args: &[&str]) -> (i32, String) {
    let path = dir.join(name);
    let p = path.to_str().unwrap();
    let mut all: Vec<&str> = args.to_vec();
    all.extend(["--output", p]);
    let code = run_args(&all);
    (code, fs::read_to_string(&path).unwrap_or_default())
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (c1, a) = run_to(dir.path(), "a.csv", &["bounds", "--samples", "3", "--threads", "1"]);
    let (c2, b) = run_to(dir.path(), "b.csv", &["bounds", "--samples", "3", "--threads", "4"]);
    assert_eq!((c1, c2), (0, 0));
    assert!(a.starts_with("bound,two_j,delta,r,window,n_cap,n,sample,lhs,rhs,margin,pass\n"));
    assert_eq!(a.lines().count(), 1 + 5 * 3 * 5);
    assert_eq!(a, b);
    let (_, c) = run_to(dir.path(), "c.csv", &["bounds", "--samples", "3", "--seed", "7"]);
    assert_ne!(a, c);
}

#[test]
fn validation_errors_exit_with_two() {
    assert_eq!(run_args(&["jacobi", "--delta", "0.9"]), 2);
    assert_eq!(run_args(&["jacobi", "--bogus"]), 2);
    assert_eq!(run_args(&["converge", "--occupation", "40:1"]), 2);
    assert_eq!(run_args(&["pinned", "--h", "0.01"]), 2);
}

#[test]
fn ground_state_check_passes() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out) = run_to(dir.path(), "g.csv", &["groundstate-check", "--two-j", "1", "--sites", "2", "--delta", "1.25"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 4);
    assert!(out.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn config_values_apply_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "delta = 2.0\n[jacobi]\nhalf_width = 10\nk = 2\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let (code, out) = run_to(dir.path(), "j1.csv", &["jacobi", "--config", cfg]);
    assert_eq!(code, 0);
    assert!(out.starts_with("delta_inv,r,gap,continuum_edge,n_isolated,ev0,ev1\n5.0000000000000000e-1,"));
    let (_, out) = run_to(dir.path(), "j2.csv", &["jacobi", "--config", cfg, "--k", "3", "--delta", "1.25"]);
    assert!(out.starts_with("delta_inv,r,gap,continuum_edge,n_isolated,ev0,ev1,ev2\n8.0000000000000004e-1,"));

    let bad = dir.path().join("bad.cfg");
    fs::write(&bad, "[jacobi]\nseed = 3\n").unwrap();
    assert_eq!(run_args(&["jacobi", "--config", bad.to_str().unwrap()]), 2);
}

#[test]
fn json_output_has_typed_records() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out) = run_to(dir.path(), "c.json", &["conjecture", "--two-j", "1,2", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["subcommand"], "conjecture");
    assert_eq!(v["pass"], true);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["two_j"], 1);
    assert!((rows[0]["gamma_over_j"].as_f64().unwrap() - 0.6144).abs() < 1e-3);
}

#[test]
fn every_subcommand_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[&[&str]] = &[
        &["phase-diagram", "--delta-inv", "0.5", "--r", "0,0.5", "--half-width", "20"],
        &["spin-gap", "--two-j", "1", "--sites", "6"],
        &["boson-compare", "--two-j", "2", "--sites", "3"],
        &["boson-compare", "--two-j", "2", "--sites", "3", "--spectrum", "--k", "2"],
        &["converge", "--two-j", "4,8,16"],
        &["concentrate", "--two-j", "4,8"],
        &["pinned", "--two-j", "4,8"],
        &["clt", "--two-j", "2,8", "--vector", "0:1:0.5:0.7"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let (code, out) = run_to(dir.path(), &format!("{i}.csv"), args);
        assert_eq!(code, 0, "{args:?}");
        assert!(out.lines().count() >= 2, "{args:?}: {out}");
    }
}
