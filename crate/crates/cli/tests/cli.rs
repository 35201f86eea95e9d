use std::process::{Command, Output};

use serde_json::Value;

fn rotsurf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rotsurf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr_json(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(text.trim()).expect("stderr is a JSON error")
}

#[test]
fn calculator_mul() {
    let out = rotsurf(&["bicomplex", "mul", "1+1i", "1+1j"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "1+1i+1j+1ij");
}

#[test]
fn calculator_negative_literal_and_json() {
    let out = rotsurf(&["bicomplex", "conj", "-1-2i", "t1", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["command"], "bicomplex");
    assert_eq!(v["schema_version"], "1.0.0");
}

#[test]
fn zero_divisor_exits_3() {
    let out = rotsurf(&["bicomplex", "inv", "1+1ij"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_json(&out)["error"]["kind"], "zero_divisor");
}

#[test]
fn malformed_literal_exits_2_with_offset() {
    let out = rotsurf(&["bicomplex", "mul", "1+", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"]["offset"], 2);
}

#[test]
fn malformed_profile_exits_2_with_offset() {
    let out = rotsurf(&["analyze", "--profile", "family:circle(lambda=1"]);
    assert_eq!(out.status.code(), Some(2));
    let e = stderr_json(&out);
    assert_eq!(e["error"]["kind"], "parse");
    assert!(e["error"]["offset"].is_u64());
    assert!(out.stdout.is_empty());
}

#[test]
fn bad_flags_exit_2() {
    for args in [
        &["analyze", "--profile", "family:circle(lambda=1)", "--grid", "4by4"][..],
        &["analyze", "--profile", "family:circle(lambda=1)", "--s", "1:0"],
        &["analyze", "--profile", "family:circle(lambda=1)", "--format", "xml"],
        &["group-check", "--surface", "clifford", "--format", "csv"],
        &["group-check", "--surface", "circle(lambda=1", "--t", "0:1"],
        &["nonsense"],
    ] {
        assert_eq!(rotsurf(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn degenerate_radius_exits_3() {
    let out = rotsurf(&["analyze", "--profile", "expr:x=s;y=0;s=0:1", "--grid", "3x3", "--s", "0:1"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn analyze_flat_circle() {
    let out = rotsurf(&["analyze", "--profile", "family:circle(lambda=1,b0=1,d=0)", "--grid", "32x32"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["summary"]["points"], 1024);
    assert!(v["summary"]["max_abs_k_closed"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn analyze_line_k_is_minus_b_squared() {
    let out = rotsurf(&["analyze", "--profile", "family:line(p=1,q=0,u=0,v=1)", "--grid", "6x4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    for p in v["points"].as_array().unwrap() {
        let b = p["b"].as_f64().unwrap();
        let k = p["k_closed"].as_f64().unwrap();
        assert!((k + b * b).abs() <= 1e-12 * (1.0 + b * b));
    }
}

#[test]
fn classify_examples() {
    let kind = |profile: &str| {
        let out = rotsurf(&["classify", "--profile", profile, "--grid", "8x8"]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        json(&out)["classification"]["kind"].as_str().unwrap().to_string()
    };
    assert_eq!(kind("family:circle(lambda=1,b0=1,d=0)"), "first");
    assert_eq!(kind("family:logspiral(mu=1)"), "none");
    assert_eq!(kind("expr:x=0.6*s;y=0.8*s;s=0.5:2"), "harmonic");
}

#[test]
fn group_check_examples() {
    let pass = |surface: &str| {
        let out = rotsurf(&["group-check", "--surface", surface]);
        assert_eq!(out.status.code(), Some(0));
        json(&out)["group"]["closure_pass"].as_bool().unwrap()
    };
    assert!(pass("clifford"));
    assert!(!pass("circle(lambda=2)"));
}

#[test]
fn output_is_deterministic() {
    let dir = std::env::temp_dir().join(format!("rotsurf-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for (cmd, fmt) in [("analyze", "json"), ("classify", "json"), ("laplacian", "csv")] {
        let mut runs = Vec::new();
        for k in 0..2 {
            let path = dir.join(format!("{cmd}-{k}.{fmt}"));
            let out = rotsurf(&[
                cmd,
                "--profile",
                "family:vranceanu(k=1)",
                "--grid",
                "6x5",
                "--format",
                fmt,
                "--out",
                path.to_str().unwrap(),
            ]);
            assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
            assert!(out.stdout.is_empty());
            runs.push(std::fs::read(&path).unwrap());
        }
        assert!(!runs[0].is_empty());
        assert_eq!(runs[0], runs[1], "{cmd} output differs between runs");
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn csv_has_header_and_rows() {
    let out = rotsurf(&["analyze", "--profile", "family:circle(lambda=1)", "--grid", "3x2", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 7);
    assert!(lines[0].starts_with("s,t,"));
}
