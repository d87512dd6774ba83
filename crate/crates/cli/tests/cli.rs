use std::fs;
use std::process::{Command, Output};

use breaklab::ExperimentConfig;
use serde_json::Value;

fn breaklab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_breaklab"))
        .args(args)
        .env_remove("BREAKLAB_PRECISION_DIGITS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

#[test]
fn rotnum_of_golden_rotation_is_all_ones() {
    let out = breaklab(&["rotnum", "--c", "1", "--eps", "0", "--delta", "0.6180339887", "--depth", "10"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let header = rows.headers().unwrap().clone();
    let col = header.iter().position(|h| h == "a_n").unwrap();
    let a: Vec<String> = rows.records().map(|r| r.unwrap()[col].to_string()).collect();
    assert_eq!(a.len(), 10);
    assert!(a.iter().all(|x| x == "1"));
}

#[test]
fn probe_of_identical_pairs_is_conjugate() {
    let out = breaklab(&["mobius-probe", "--pair", "1.1,0.4,2.718281828", "--pair", "1.1,0.4,2.718281828"]);
    let r = json(&out);
    assert_eq!(r["conjugate"], true);
    assert!(r["residual"].as_f64().unwrap() < 1e-12);
    assert_eq!(r["schemaVersion"], 1);
}

#[test]
fn probe_needs_two_pairs() {
    let out = breaklab(&["mobius-probe", "--pair", "1.1,0.4,2.7"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unit_break_is_a_validation_error() {
    let out = breaklab(&["experiment", "--c", "1", "--eps", "1", "--target", "golden"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("break size 1"));
}

#[test]
fn malformed_flags_are_validation_errors() {
    assert_eq!(breaklab(&["rotnum", "--c", "x", "--delta", "0.3"]).status.code(), Some(2));
    assert_eq!(breaklab(&["rotnum", "--c", "-2", "--delta", "0.3"]).status.code(), Some(2));
    assert_eq!(breaklab(&["partition", "--c", "2", "--levels", "9:3"]).status.code(), Some(2));
    assert_eq!(breaklab(&["tune", "--c", "2", "--target", "bronze"]).status.code(), Some(2));
    assert_eq!(
        breaklab(&["tune", "--c", "2", "--precision-digits", "100"]).status.code(),
        Some(2)
    );
}

#[test]
fn precision_exhaustion_names_the_level() {
    let out = breaklab(&["conjugacy", "--c", "2", "--eps", "1", "--levels", "8:34"]);
    assert_eq!(out.status.code(), Some(3));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("precision exhausted at level"), "{}", msg);
}

#[test]
fn experiment_report_round_trips_its_config() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = breaklab(&[
        "experiment",
        "--c",
        "2.5",
        "--eps",
        "1",
        "--target",
        "golden",
        "--levels",
        "6:11",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r: Value = serde_json::from_str(&fs::read_to_string(out_dir.join("experiment.json")).unwrap()).unwrap();
    assert!(r["alphaHat"].is_number());
    assert_eq!(r["schemaVersion"], 1);
    assert!(r["ledger"]["D"].is_number());
    let cfg: ExperimentConfig = serde_json::from_value(r["config"].clone()).unwrap();
    assert_eq!(cfg.n_min, 6);
    assert_eq!(cfg.n_max, 11);
    assert_eq!(cfg.c, 2.5);
    assert_eq!(serde_json::to_value(&cfg).unwrap(), r["config"]);
    let mut files: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    files.sort();
    assert_eq!(files, vec!["out"]);
    let csv = fs::read_to_string(out_dir.join("experiment_levels.csv")).unwrap();
    assert_eq!(csv.lines().count(), 7);
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "# golden run\nc = 2.71828\neps = 1\ntarget = golden\nnMin = 6\nnMax = 10\nalphaGate = 0.97\n",
    )
    .unwrap();
    let out = breaklab(&["experiment", "--config", cfg.to_str().unwrap(), "--n-max", "11"]);
    let r = json(&out);
    assert_eq!(r["config"]["nMin"], 6);
    assert_eq!(r["config"]["nMax"], 11);
    assert_eq!(r["config"]["alphaGate"], 0.97);
}

#[test]
fn csv_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str| {
        let p = dir.path().join(sub);
        let out = breaklab(&[
            "renorm",
            "--c",
            "2",
            "--eps",
            "0.5",
            "--levels",
            "4:9",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        fs::read(p.join("renorm.csv")).unwrap()
    };
    let a = run("a");
    assert_eq!(a, run("b"));
    let text = String::from_utf8(a).unwrap();
    let first = text.lines().nth(1).unwrap();
    // 17 significant digits in scientific notation.
    let alpha = first.split(',').nth(1).unwrap();
    let mantissa = alpha.split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17);
}

#[test]
fn environment_selects_high_precision() {
    let out = Command::new(env!("CARGO_BIN_EXE_breaklab"))
        .args(["tune", "--c", "2", "--eps", "1", "--depth", "8"])
        .env("BREAKLAB_PRECISION_DIGITS", "40")
        .output()
        .unwrap();
    let r = json(&out);
    assert_eq!(r["config"]["precisionDigits"], 40);
    assert!(r["deltaDigits"].as_str().unwrap().len() > 30);
    assert_eq!(r["quotients"].as_array().unwrap().len(), 8);
}

#[test]
fn xi_of_rigid_rotation_vanishes() {
    let out = breaklab(&["xi", "--c", "1", "--delta", "0.3", "--a", "0.1", "--b", "0.4", "--iterates", "5"]);
    let r = json(&out);
    assert_eq!(r["xi"], 0.0);
    assert_eq!(r["xiPower"], 0.0);
    assert!(r["ledger"].is_null());
}

#[test]
fn partition_and_conjugacy_reports() {
    let p = json(&breaklab(&["partition", "--c", "2", "--eps", "1", "--levels", "2:10"]));
    assert!(p["decay"]["gamma1Hat"].as_f64().unwrap() < 1.0);
    let c = json(&breaklab(&["conjugacy", "--c", "2", "--eps", "1", "--levels", "6:10"]));
    assert_eq!(c["orderIsomorphic"], true);
    assert!(c["holder"]["alphaHat"].as_f64().unwrap() <= 1.0);
}
