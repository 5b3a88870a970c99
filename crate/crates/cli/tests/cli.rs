//! End-to-end runs of the binary: outputs, determinism and exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_transurf"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("transurf-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

#[test]
fn s0_scan_reports_one_cross_cap() {
    let out = run(&["scan", "--pair", "s0", "--window", "-2,2,-2,2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let pts = doc["singular_points"].as_array().unwrap();
    assert_eq!(pts.len(), 1);
    assert_eq!(pts[0]["verdict"], "CrossCap");
    assert_eq!(pts[0]["classification"]["routes"][0]["route"], "gfs");
}

#[test]
fn sin_scan_has_two_isolated_images_and_a_locus() {
    let report = scratch("sin.json");
    let locus = scratch("sin.csv");
    let out = run(&[
        "scan", "--curve-a", "@sin_curve", "--self", "plus", "--window", "-pi,pi,-pi,pi", "--grid", "48",
        "--report", report.to_str().unwrap(), "--out", locus.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(doc["isolated_images"].as_array().unwrap().len(), 2);
    let csv = std::fs::read_to_string(&locus).unwrap();
    assert!(csv.starts_with("u,v,conditions,dependence,isolated\n"));
    assert!(csv.lines().count() > 10);
}

#[test]
fn mesh_is_deterministic_and_sized() {
    let a = scratch("a.obj");
    let b = scratch("b.obj");
    for p in [&a, &b] {
        let out = run(&["mesh", "--pair", "s1p", "--window", "-2,2,-2,2", "--grid", "33", "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let text = String::from_utf8(ta).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 1089);
    assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 2048);
    assert!(text.contains("v 0.00000000e0 0.00000000e0 0.00000000e0\n"));
}

#[test]
fn sin_minus_diagonal_maps_to_origin() {
    let out = run(&["mesh", "--curve-a", "@sin_curve", "--self", "minus", "--window", "-pi,pi,-pi,pi", "--grid", "17", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        if f[0] == f[1] {
            assert!(f[2..].iter().all(|x| x.parse::<f64>().unwrap().abs() < 1e-10), "{line}");
        }
    }
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let args = ["scan", "--curve-a", "@self_s1p", "--self", "plus", "--window", "-pi,pi,-pi,pi", "--grid", "32"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn expression_curves_and_tolerance_overrides() {
    let out = run(&[
        "scan", "--curve-a", "(u, u^2/2, 0)", "--frame-a", "(-u/sqrt(1 + u^2), 1/sqrt(1 + u^2), 0); (0, 0, 1)",
        "--curve-b", "@s0_b", "--window", "-1,1,-1,1", "--grid", "16", "--tol", "crit=1e-6",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8(out.stdout).unwrap().contains("\"crit\": 9.9999999999999995e-7"));
}

#[test]
fn input_errors_exit_with_two() {
    for args in [
        vec!["scan", "--pair", "s0", "--window", "1,1,0,1"],
        vec!["scan", "--pair", "s0", "--grid", "8"],
        vec!["scan", "--pair", "nope"],
        vec!["scan", "--curve-a", "(t, t^2"],
        vec!["scan", "--pair", "s0", "--tol", "crit=-1"],
        vec!["mesh", "--pair", "s0", "--format", "stl"],
        vec!["verify", "nope"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn verify_suites_pass() {
    for suite in ["lemma", "examples", "jets"] {
        let out = run(&["verify", suite]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
        assert!(String::from_utf8(out.stdout).unwrap().contains(", 0 failed"));
    }
}
