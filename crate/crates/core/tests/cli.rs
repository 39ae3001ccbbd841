//! Drives the `sqprime` binary end to end.

use std::process::Command;

fn sqprime(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_sqprime")).args(args).output().expect("run sqprime");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn sieve_lists_first_hundred() {
    let (code, out, err) = sqprime(&["sieve", "--limit", "549", "--format", "csv"]);
    assert_eq!(code, 0, "{err}");
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "n,p,a");
    assert_eq!(lines.len(), 101);
    assert_eq!(lines[1], "8,2,2");
    assert_eq!(lines[100], "549,61,3");
    assert!(err.is_empty());
}

#[test]
fn pell_twins() {
    let (code, out, err) = sqprime(&["pell", "--gap", "1", "--count", "2", "--limit", "1000"]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(out, "g,u,p_u,a_u,v,p_v,a_v\n1,27,3,3,28,7,2\n1,332667,3,333,332668,7,218\n");
    let (code, out, _) =
        sqprime(&["pell", "--gap", "1", "--count", "6", "--limit", "1000", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 6);
    // later pairs exceed u64 and are carried as decimal strings
    assert!(rows[5]["v"].as_str().unwrap().len() > 20);
}

#[test]
fn zeta_at_one() {
    let (code, out, _) = sqprime(&["zeta", "--c", "1"]);
    assert_eq!(code, 0);
    let row = out.lines().nth(1).unwrap();
    assert!(row.starts_with("1.00000000000000,1.64493406684823,"), "{row}");
    let (code, out, _) = sqprime(&["zeta", "--c", "1/2", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v[0]["value"].as_f64().unwrap() - 4.934_802_200_544_68).abs() < 1e-12);
    assert_eq!(sqprime(&["zeta", "--c", "3"]).0, 2);
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gaps.csv");
    let (code, out, _) = sqprime(&["gaps", "--limit", "100", "--output", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("g,first_lo,count\n1,27,4\n"), "{text}");
}

#[test]
fn schemas() {
    let header = |args: &[&str]| sqprime(args).1.lines().next().unwrap_or_default().to_string();
    assert_eq!(header(&["density", "--limit", "10000"]), "n,sp_exact,pi_n,asymptotic,ratio");
    assert_eq!(header(&["goldbach", "--limit", "5000"]), "n");
    assert_eq!(header(&["gaps", "--limit", "1000"]), "g,first_lo,count");
    assert_eq!(
        header(&["digits", "--limit", "1000"]),
        "digit,count,share,predicted_share,constant_literal,constant_corrected"
    );
    let (_, out, _) = sqprime(&["digits", "--limit", "1000"]);
    let zero = out.lines().nth(1).unwrap();
    assert!(zero.starts_with("0,") && zero.ends_with(",,,"), "{zero}");
    let (_, out, _) = sqprime(&["twins", "--limit", "100"]);
    assert_eq!(out, "lo,hi\n27,28\n44,45\n75,76\n98,99\n");
}

#[test]
fn failing_verification_and_usage() {
    let (code, out, err) = sqprime(&["squares", "--limit", "10000", "--threshold", "2"]);
    let failures: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(code, if failures.is_empty() { 0 } else { 1 }, "{err}");
    let (code, out, err) = sqprime(&["nope"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("Usage"));
    let (code, _, err) = sqprime(&["sieve", "--limit", "1000000"]);
    assert_eq!(code, 0, "{err}");
}

#[test]
fn memory_cap_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_sqprime"))
        .args(["count", "--limit", "100000000"])
        .env("SP_MEMORY_CAP_MB", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("memory cap"));
}
