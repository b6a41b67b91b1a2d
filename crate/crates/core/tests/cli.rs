use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn hdx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hdx")).args(args).output().expect("hdx runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hdx-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn build_then_h1_on_a_triangle() {
    let path = scratch("triangle.json");
    let out = hdx(&["build", "complete", "--n", "3", "--d", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    std::fs::write(&path, &out.stdout).unwrap();

    let out = hdx(&["h1", "--input", path.to_str().unwrap(), "--expansion", "cosystolic"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out)["value"], "3");

    let out = hdx(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn validate_points_at_the_bad_field() {
    let path = scratch("bad.json");
    std::fs::write(
        &path,
        r#"{"kind": "complex", "dimension": 1, "vertices": 2, "top_faces": [{"verts": [0, 1], "weight": "1/2"}]}"#,
    )
    .unwrap();
    let out = hdx(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout).to_string() + &String::from_utf8_lossy(&out.stderr);
    assert!(text.contains("weight"), "{text}");
}

#[test]
fn suite_reports_are_byte_identical_and_exit_zero() {
    let a = scratch("a.json");
    let b = scratch("b.json");
    for p in [&a, &b] {
        let out = hdx(&["--seed", "11", "--report", p.to_str().unwrap(), "suite", "strong-sat"]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let (ra, rb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ra, rb);
    let report: Value = serde_json::from_slice(&ra).unwrap();
    assert_eq!(report["criterion"], 4);
    assert_eq!(report["seed"], 11);
}

#[test]
fn unknown_suite_is_an_error() {
    assert_eq!(hdx(&["suite", "nope"]).status.code(), Some(2));
}

#[test]
fn failing_bound_exits_one() {
    let out = hdx(&["suite", "faces-cone", "trials=10"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn petersen_from_the_swap_walk() {
    let path = scratch("simplex5.json");
    let out = hdx(&["build", "complete", "--n", "5", "--d", "4"]);
    std::fs::write(&path, &out.stdout).unwrap();
    let out = hdx(&["spectra", "--input", path.to_str().unwrap(), "--walk", "swap:1,1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let l = stdout_json(&out)["spectrum"]["lambda2"].as_f64().unwrap();
    assert!((l - 1.0 / 3.0).abs() < 1e-9, "{l}");
}

#[test]
fn cone_build_verify_and_decode() {
    let complex = scratch("d4.json");
    std::fs::write(&complex, hdx(&["build", "complete", "--n", "4", "--d", "2"]).stdout).unwrap();
    let cone = scratch("d4-cone.json");
    let out = hdx(&["cone", "build", "--input", complex.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    std::fs::write(&cone, &out.stdout).unwrap();
    let out = hdx(&["cone", "verify", cone.to_str().unwrap()]);
    assert_eq!(stdout_json(&out)["valid"], true);

    let cochain = scratch("identity.json");
    std::fs::write(
        &cochain,
        r#"{"kind": "cochain", "degree": 1, "group": "z2", "values": [
            {"face": [0, 1], "elem": "1"}, {"face": [0, 2], "elem": "1"}, {"face": [0, 3], "elem": "1"},
            {"face": [1, 2], "elem": "0"}, {"face": [1, 3], "elem": "0"}, {"face": [2, 3], "elem": "0"}]}"#,
    )
    .unwrap();
    let out = hdx(&["cone", "decode", cone.to_str().unwrap(), cochain.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out)["distance_to_decoded"], "0");
}

#[test]
fn builders_compose() {
    let k22 = scratch("k22.json");
    std::fs::write(&k22, hdx(&["build", "partite", "--parts", "2,2"]).stdout).unwrap();
    let out = hdx(&["build", "tensor", "--input", k22.to_str().unwrap(), "--other", k22.to_str().unwrap()]);
    assert_eq!(stdout_json(&out)["top_faces"].as_array().unwrap().len(), 16);
    let tri = scratch("tri.json");
    std::fs::write(&tri, hdx(&["build", "complete", "--n", "3", "--d", "2"]).stdout).unwrap();
    let out = hdx(&["build", "blowup", "--input", tri.to_str().unwrap(), "--m", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out)["kind"], "blow-up");
    let out = hdx(&["validate", "/dev/stdin"]);
    assert_ne!(out.status.code(), Some(0));
}
