use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn qhnf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qhnf")).args(args).output().expect("binary runs")
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let out = qhnf(args);
    let code = out.status.code().expect("exit code");
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stderr))
    });
    (code, v)
}

fn template() -> String {
    data("template.sys").to_string_lossy().into_owned()
}

#[test]
fn integrable_point_exits_no_obstruction() {
    let (code, v) = run_json(&["verdict", "-f", &template(), "--assign", "a1=0,b0=3,b2=-3"]);
    assert_eq!(code, 11);
    assert_eq!(v["verdict"]["kind"], "no-obstruction-up-to");
    assert_eq!(v["verdict"]["up_to"], 10);
    assert_eq!(v["classification"]["case"], "B4");
    assert_eq!(v["classification"]["d"], "-1/3");
    assert_eq!(v["leading_verdict"]["m1"], 1);
    assert_eq!(v["leading_verdict"]["m2"], 2);
}

#[test]
fn first_obstruction_is_reported_exactly() {
    let (code, v) = run_json(&["verdict", "-f", &template(), "--assign", "a1=1", "--assign", "b0=0,b2=0"]);
    assert_eq!(code, 10);
    assert_eq!(v["verdict"]["first_obstruction_degree"], 2);
    assert_eq!(v["verdict"]["coefficient"], "29/168");
    assert_eq!(v["obstructions"][0]["invariant"], true);
    assert_eq!(v["assignment"]["a1"], "1");
}

#[test]
fn repeated_factor_is_leading_obstruction() {
    let (code, v) = run_json(&["verdict", "-f", &data("b3.sys").to_string_lossy()]);
    assert_eq!(code, 12);
    assert_eq!(v["verdict"]["reason"], "multiple-factor-obstruction");
    assert_eq!(v["classification"]["case"], "B3");
}

#[test]
fn reports_are_deterministic() {
    let args = ["nf", "-f", &template(), "--assign", "a1=1/2,b0=-1,b2=2"];
    let a = qhnf(&args);
    let b = qhnf(&args);
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["transform_digest"], v["transform"]["digest"]);
    assert_eq!(v["transform_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn json_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("qhnf-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = qhnf(&["classify", "-f", &template(), "--assign", "a1=0,b0=0,b2=0", "--json", &path.to_string_lossy()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["classification"]["qtype"], serde_json::json!([1, 2]));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn input_errors_exit_one_with_position() {
    let dir = std::env::temp_dir().join(format!("qhnf-cli-err-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.sys");
    std::fs::write(&bad, "dx = y\ndy = x^2 + c*y\n").unwrap();
    let out = qhnf(&["verdict", "-f", &bad.to_string_lossy()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`c` at 2:12"));

    let out = qhnf(&["verdict", "-f", &template()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unassigned parameter"));

    let out = qhnf(&["verdict", "-f", &template(), "--assign", "a1=0,b0=0,b2=0", "--type", "1,3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("type mismatch"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn curves_and_integral() {
    let (code, v) = run_json(&["curves", "-f", &template(), "--assign", "a1=0,b0=0,b2=0"]);
    assert_eq!(code, 0);
    assert_eq!(v["curves"][0]["curve"], "y - x^2");
    assert_eq!(v["curves"][1]["curve"], "y + x^2");
    let (_, v) = run_json(&["integral", "-f", &template(), "--assign", "a1=1,b0=0,b2=0", "-N", "12"]);
    assert_eq!(v["integral"]["first_failure"], 8);
}

#[test]
fn certificate_checks() {
    let (_, v) = run_json(&[
        "check-darboux", "-f", &template(), "--assign", "a1=0,b0=0,b2=0",
        "--factor", "y - x^2:1", "--factor", "y + x^2:2",
    ]);
    assert_eq!(v["holds"], true);
    let (_, v) = run_json(&["check-darboux", "-f", &template(), "--assign", "a1=1,b0=0,b2=0", "--factor", "y - x^2"]);
    assert_eq!(v["holds"], false);
    let (_, v) = run_json(&[
        "check-symmetry", "-f", &template(), "--assign", "a1=0,b0=0,b2=0",
        "--gx", "x", "--gy", "2*y", "--mu", "1",
    ]);
    assert_eq!(v["symmetry"]["holds"], true);
    assert_eq!(v["symmetry"]["mu0_is_r"], true);
}

#[test]
fn sweep_keeps_grid_order() {
    let (code, v) = run_json(&[
        "sweep", "-f", &template(), "--grid", "a1=-1,0,1", "--grid", "b0=-1,0,1", "--grid", "b2=-1,0,1",
    ]);
    assert_eq!(code, 0);
    let pts = v["points"].as_array().unwrap();
    assert_eq!(pts.len(), 27);
    assert_eq!(pts[0]["assignment"]["a1"], "-1");
    assert_eq!(pts[26]["assignment"]["b2"], "1");
    let p = pts.iter().find(|p| p["assignment"] == serde_json::json!({"a1": "0", "b0": "1", "b2": "0"})).unwrap();
    assert_eq!(p["verdict"]["coefficient"], "9/112");
    for p in pts {
        let single = run_json(&[
            "verdict", "-f", &template(), "--assign",
            &format!("a1={},b0={},b2={}", p["assignment"]["a1"].as_str().unwrap(), p["assignment"]["b0"].as_str().unwrap(), p["assignment"]["b2"].as_str().unwrap()),
        ]);
        assert_eq!(single.1["verdict"], p["verdict"]);
        assert_eq!(single.0 as u64, p["exit"].as_u64().unwrap());
    }
}
