use std::path::Path;
use std::process::{Command, Output};

fn ostbc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ostbc"))
        .args(args)
        .env_remove("OSTBC_CATALOG")
        .output()
        .expect("spawn ostbc")
}

fn ok(args: &[&str]) -> String {
    let out = ostbc(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn spectrum_rows() {
    let r = rows(&ok(&["spectrum", "alamouti-bpsk"]));
    assert_eq!(r.len(), 2);
    assert!((num(&r[0][0]) - 2f64.sqrt()).abs() < 1e-9 && r[0][2] == "2");
    assert!((num(&r[1][0]) - 2.0).abs() < 1e-9 && r[1][2] == "1");
    let r = rows(&ok(&["spectrum", "--code", "alamouti-bio4"]));
    assert_eq!(r.len(), 2);
    assert!((num(&r[0][0]) - 2f64.sqrt()).abs() < 1e-9 && r[0][2] == "6");
}

#[test]
fn unknown_key_is_a_validation_error() {
    let out = ostbc(&["spectrum", "no-such-entry"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no-such-entry"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(ostbc(&["bogus"]).status.code(), Some(2));
    assert_eq!(ostbc(&["spectrum"]).status.code(), Some(2));
    assert_eq!(ostbc(&["exact", "--snr-step", "-1"]).status.code(), Some(2));
    assert_eq!(ostbc(&["simulate", "alamouti-bpsk", "--decoder", "magic"]).status.code(), Some(2));
}

#[test]
fn bounds_limits() {
    let r = rows(&ok(&["bounds", "alamouti-qpsk", "--nr", "2", "--snr-db=-inf,40"]));
    assert_eq!(r[0][0], "gamma_c");
    assert_eq!(num(&r[0][2]), 7.5);
    let (union, asym) = (num(&r[1][2]), num(&r[1][3]));
    assert!((asym / union - 1.0).abs() < 0.05);
}

#[test]
fn exact_rows() {
    let r = rows(&ok(&["exact", "--k", "1", "--snr-db=-inf,0"]));
    assert_eq!((num(&r[0][2]), num(&r[0][3])), (0.5, 0.75));
    assert!((num(&r[1][2]) - 0.146_447).abs() < 1e-6);
    for row in rows(&ok(&["exact", "--nr", "2", "--snr-start", "0", "--snr-stop", "30", "--snr-step", "1"])) {
        assert!(num(&row[3]) >= num(&row[2]));
    }
}

#[test]
fn simulate_is_reproducible_and_replayable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let common = ["simulate", "--design", "alamouti-qpsk", "--nr", "2", "--trials", "20000", "--seed", "7"];
    let with_out = |p: &Path| {
        let mut v: Vec<String> = common.iter().map(|s| s.to_string()).collect();
        v.extend(["--snr-start", "0", "--snr-stop", "6", "--snr-step", "3", "--out"].map(String::from));
        v.push(p.display().to_string());
        v
    };
    for p in [&a, &b] {
        let args = with_out(p);
        ok(&args.iter().map(String::as_str).collect::<Vec<_>>());
    }
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    let manifest = dir.path().join("a.csv.manifest.json");
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&manifest).unwrap()).unwrap();
    assert_eq!(m["seed"], 7);
    assert_eq!(m["config"]["decoder"], "full_mimo");
    let replayed = ok(&["replay", manifest.to_str().unwrap()]);
    assert_eq!(replayed.as_bytes(), bytes.as_slice());
}

#[test]
fn decoders_agree() {
    let run = |decoder: &str| {
        let csv = ok(&[
            "simulate", "alamouti-bio4", "--nr", "1", "--snr-db", "5", "--trials", "100000", "--seed", "3",
            "--decoder", decoder,
        ]);
        num(&rows(&csv)[0][6])
    };
    let (full, equiv) = (run("full_mimo"), run("equivalent_simo"));
    let p = (full + equiv) / 2.0;
    let sigma = (2.0 * p * (1.0 - p) / 100_000.0).sqrt();
    assert!((full - equiv).abs() <= 3.0 * sigma, "{full} vs {equiv}");
}

#[test]
fn checkbounds_certificates() {
    for key in ["alamouti-bio4", "alamouti-bpsk"] {
        let v: serde_json::Value = serde_json::from_str(&ok(&["checkbounds", key])).unwrap();
        assert_eq!(v["rankin_third"]["equality"], true, "{key}");
        assert_eq!(v["coxeter_holds"], true, "{key}");
    }
}

const SKEWED: &str = r#"{"entries": [{
  "key": "skewed",
  "design": {"name": "alamouti", "n_tx": 2, "n_info": 2, "cells": [
    {"row": 0, "col": 0, "sym": 0, "conj": false, "sign": 1},
    {"row": 0, "col": 1, "sym": 1, "conj": false, "sign": 1},
    {"row": 1, "col": 0, "sym": 1, "conj": true, "sign": -1},
    {"row": 1, "col": 1, "sym": 0, "conj": true, "sign": 1}]},
  "blocks": 1,
  "code": {"n": 4, "codewords": [[1,0,1,0],[1,0,3,0],[3,0,1,0],[3,0,3,0]], "labels": [0,1,2,3]},
  "notes": "two-level amplitudes"
}]}"#;

#[test]
fn custom_catalog_via_env() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("extra.json");
    std::fs::write(&path, SKEWED).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_ostbc"))
        .args(["checkbounds", "skewed"])
        .env("OSTBC_CATALOG", &path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("spherical"));
    let listed = Command::new(env!("CARGO_BIN_EXE_ostbc"))
        .args(["catalog", "list"])
        .env("OSTBC_CATALOG", &path)
        .output()
        .unwrap();
    assert!(String::from_utf8_lossy(&listed.stdout).contains("skewed"));
}

#[test]
fn export_round_trips_and_duplicates_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cat.json");
    ok(&["catalog", "export", "--out", path.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["entries"].as_array().unwrap().len(), 6);
    // the export repeats the built-in keys
    let out = ostbc(&["--catalog", path.to_str().unwrap(), "catalog", "list"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn qpsk_frame_display() {
    let v: serde_json::Value = serde_json::from_str(&ok(&["catalog", "show", "alamouti-bio4", "--qpsk-frame"])).unwrap();
    for cw in v["code"]["codewords"].as_array().unwrap() {
        for x in cw.as_array().unwrap() {
            assert!((x.as_f64().unwrap().abs() - 0.5f64.sqrt()).abs() < 1e-12);
        }
    }
    assert_eq!(ostbc(&["catalog", "show", "rate34-bpsk", "--qpsk-frame"]).status.code(), Some(3));
}
