use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn hcfam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hcfam")).args(args).output().expect("binary runs")
}

fn hcfam_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_hcfam"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON report")
}

#[test]
fn fiber_example_reports_both_vanishing_indices() {
    let out = hcfam(&["module", "fiber", "--at", "1/8", "--window", "-6..6"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["verdict"], "fail");
    let ns: Vec<i64> = r["result"]["vanishing"].as_array().unwrap().iter().map(|v| v["n"].as_i64().unwrap()).collect();
    assert_eq!(ns, vec![-4, 2]);
}

#[test]
fn generic_fiber_is_irreducible() {
    let out = hcfam(&["module", "fiber", "--at", "1/3", "--window", "-6..6"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["irreducible"], true);
}

#[test]
fn repeated_runs_are_byte_identical() {
    for args in [
        &["module", "locus", "--window", "-10..10"][..],
        &["grassmann", "pencil", "--pq", "2,1"][..],
        &["classify", "probe", "--weights", "even", "--class", "III", "--casimir", "1,2,3", "--seed", "7"][..],
    ] {
        let a = hcfam(args);
        let b = hcfam(args);
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn keys_are_sorted_and_compact() {
    let out = hcfam(&["family", "build", "--kind", "contraction"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.trim_end().contains('\n'));
    assert!(!text.contains(": "));
    assert!(text.starts_with("{\"input\":"));
    assert_eq!(serde_json::to_string(&report_from(&text)).unwrap(), text.trim_end());
}

fn report_from(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn family_round_trips_through_stdin() {
    let built = hcfam(&["family", "build", "--kind", "deformation"]);
    let fam = serde_json::to_string(&report(&built)["result"]).unwrap();
    let jac = hcfam_stdin(&["family", "jacobi", "--family", "-"], &fam);
    assert_eq!(jac.status.code(), Some(0));
    for (at, solvable) in [("0", true), ("1", false)] {
        let fib = hcfam_stdin(&["family", "fiber", "--family", "-", "--at", at], &fam);
        assert_eq!(fib.status.code(), Some(0));
        assert_eq!(report(&fib)["result"]["invariants"]["solvable"], solvable, "at {at}");
    }
}

#[test]
fn module_file_validates() {
    let built = hcfam(&["classify", "construct", "--weights", "even", "--class", "III", "--casimir", "1,2,3"]);
    assert_eq!(built.status.code(), Some(0));
    let m = serde_json::to_string(&report(&built)["result"]).unwrap();
    let v = hcfam_stdin(&["module", "validate", "--module", "-"], &m);
    assert_eq!(v.status.code(), Some(0));
    assert_eq!(report(&v)["verdict"], "pass");
}

#[test]
fn malformed_input_exits_two() {
    assert_eq!(hcfam(&["module", "fiber", "--at", "zz"]).status.code(), Some(2));
    assert_eq!(hcfam(&["module", "locus", "--window", "3..1"]).status.code(), Some(2));
    let bad = hcfam_stdin(&["family", "jacobi", "--family", "-"], "{\"rank\": 3");
    assert_eq!(bad.status.code(), Some(2));
    assert_eq!(report(&bad)["error"]["kind"], "schema");
}

#[test]
fn excluded_casimir_exits_three() {
    let out = hcfam(&["classify", "construct", "--weights", "even", "--class", "III", "--casimir", "0,0,0"]);
    assert_eq!(out.status.code(), Some(3));
    let r = report(&out);
    assert!(r["error"]["kind"].is_string());
    assert!(r.get("result").is_none());
}

#[test]
fn grassmann_limits_and_real_forms() {
    for b in ["0", "inf"] {
        let out = hcfam(&["grassmann", "subalg", "--pq", "2,1", "--boundary", b]);
        assert_eq!(out.status.code(), Some(0), "boundary {b}");
        let out = hcfam(&["grassmann", "closure", "--pq", "2,1", "--boundary", b]);
        assert_eq!(out.status.code(), Some(0), "boundary {b}");
    }
    let split = report(&hcfam(&["grassmann", "realform", "--pq", "1,1", "--det-one", "--at", "1"]));
    assert_eq!(split["result"]["killing_signature"], serde_json::json!([2, 0, 1]));
    let compact = report(&hcfam(&["grassmann", "realform", "--pq", "1,1", "--det-one", "--at", "-1"]));
    assert_eq!(compact["result"]["killing_signature"], serde_json::json!([0, 0, 3]));
    assert_eq!(hcfam(&["grassmann", "compare", "--pq", "1,1", "--det-one"]).status.code(), Some(0));
}

#[test]
fn output_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("hcfam-cli-test-{}.json", std::process::id()));
    let out = hcfam(&["verify", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(r["verdict"], "pass");
    assert!(r.get("timing_ms").is_none());
}
