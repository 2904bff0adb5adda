use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qcommute(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcommute"))
        .args(args)
        .env_remove("QCOMMUTE_SEED")
        .output()
        .expect("binary runs")
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn matrix_basis_sizes() {
    let dir = tempfile::tempdir().unwrap();
    for (n, deg, size) in [("2", "6", 7usize), ("3", "4", 15)] {
        let out = dir.path().join(format!("m{n}.json"));
        let o = qcommute(&["matrix", "--n", n, "--deg", deg, "--seed", "3", "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let m = read_json(&out);
        assert_eq!(m["basis"].as_array().unwrap().len(), size);
        assert_eq!(m["entries"].as_array().unwrap().len(), size);
        // lower triangular in the basis order
        for (r, row) in m["entries"].as_array().unwrap().iter().enumerate() {
            for c in r + 1..size {
                assert_eq!(row[c], "0/1");
            }
        }
    }
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    for p in [&a, &b] {
        let o = qcommute(&["verify", "--check", "commutator", "--check", "lemma1", "--n", "2", "--seeds", "2", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn seed_comes_from_environment() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_qcommute"));
        c.args(["point", "sample", "--n", "2", "--deg", "3"]);
        if let Some(s) = flag {
            c.args(["--seed", s]);
        }
        match env {
            Some(e) => c.env("QCOMMUTE_SEED", e),
            None => c.env_remove("QCOMMUTE_SEED"),
        };
        c.output().unwrap().stdout
    };
    assert_eq!(run(Some("9"), None), run(None, Some("9")));
    assert_ne!(run(Some("9"), None), run(None, None));
}

#[test]
fn malformed_params_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"u": "1/0", "v": "2", "s": ["1", "4"], "alpha": "3/5"}"#).unwrap();
    let o = qcommute(&["matrix", "--n", "2", "--deg", "3", "--params", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    std::fs::write(&bad, "not json").unwrap();
    let o = qcommute(&["matrix", "--n", "2", "--deg", "3", "--params", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = qcommute(&["matrix", "--n", "2", "--deg", "3", "--params", "/nonexistent/p.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(qcommute(&["verify", "--check", "ramanujan"]).status.code(), Some(2));
    assert_eq!(qcommute(&["verify", "--check", "nosuch"]).status.code(), Some(2));
    assert_eq!(qcommute(&["matrix", "--n", "2"]).status.code(), Some(2));
    assert_eq!(qcommute(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn non_generic_params_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.json");
    // q = 1
    std::fs::write(&p, r#"{"u": "1", "v": "2/3", "s": ["9/25", "49/16"], "alpha": "5/7"}"#).unwrap();
    let o = qcommute(&["matrix", "--n", "2", "--deg", "3", "--params", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn approximate_check_runs_with_flag() {
    let o = qcommute(&["verify", "--check", "ramanujan", "--approx", "--seeds", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let line: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(line["claim"], "approximate");
    assert_eq!(line["status"], "pass");
}

#[test]
fn eigen_payload_matches_suite_report() {
    let dir = tempfile::tempdir().unwrap();
    let e = dir.path().join("e.json");
    let o = qcommute(&["eigen", "--n", "3", "--deg", "6", "--index", "0,0", "--seed", "4", "--out", e.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let eig = read_json(&e);

    let r = dir.path().join("r.jsonl");
    let o = qcommute(&["verify", "--check", "n3", "--seed", "4", "--seeds", "1", "--out", r.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rep: Value = serde_json::from_str(std::fs::read_to_string(&r).unwrap().lines().next().unwrap()).unwrap();
    assert_eq!(rep["details"]["eigen"], eig["eigen"]);
    assert_eq!(rep["point"], eig["point"]);
}

#[test]
fn inspect_reports_genericity() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.json");
    let o = qcommute(&["point", "sample", "--n", "3", "--deg", "4", "--seed", "2", "--out", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = qcommute(&["point", "inspect", p.to_str().unwrap(), "--deg", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["generic"], true);
    assert_eq!(v["n"], 3);
}
