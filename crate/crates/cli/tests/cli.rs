use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn clext(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clext")).args(args).output().expect("running clext")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json_at(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn verify_worked_spec_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("verify.json");
    let o = clext(&["verify", "--lambda", "3", "--alpha", "1,-0.5,-0.5", "--dim", "30", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json_at(&out);
    assert_eq!(v["pass"], true);
    assert_eq!(v["header"]["command"], "verify");
    assert_eq!(v["header"]["dim"], 30);
    assert_eq!(v["header"]["seed"], 42);
    assert_eq!(v["header"]["spec"]["alpha"], serde_json::json!([1.0, -0.5, -0.5]));
    assert_eq!(v["body"]["classification"]["kind"], "bounded-from-below");
    assert!(v["body"]["relations"]["entries"].as_array().unwrap().len() >= 17);
}

#[test]
fn pssqm_check_worked_example() {
    let o = clext(&["pssqm-check", "--p", "2", "--mu", "0", "--alpha", "1,-0.5,-0.5"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let r: Vec<f64> = v["body"]["config"]["r"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    for (a, b) in r.iter().zip([-2.5, 1.0, 0.0]) {
        assert!((a - b).abs() < 1e-12, "{r:?}");
    }
    assert_eq!(v["body"]["khare"]["pass"], true);
    assert_eq!(v["body"]["breaking"]["breaking"]["kind"], "unbroken");
    assert_eq!(v["body"]["breaking"]["ground_energy"], -0.25);
    assert_eq!(v["body"]["precision"], "double-double");
}

#[test]
fn tampered_shifts_fail_the_check() {
    let o = clext(&["pssqm-check", "--p", "2", "--mu", "0", "--alpha", "1,-0.5,-0.5", "--r", "-2.5,1,0.1"]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pass"], false);
    assert_eq!(v["body"]["khare"]["pass"], false);
}

#[test]
fn bd_scan_csv_has_one_zero_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan.csv");
    let o = clext(&[
        "bd-scan", "--scan-from", "-2", "--scan-to", "0", "--scan-points", "41", "--format", "csv", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("parameter,residual"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 41);
    let small: Vec<f64> = rows.iter().filter(|r| r.1 <= 1e-10).map(|r| r.0).collect();
    assert_eq!(small, vec![-1.0]);
}

#[test]
fn config_file_with_bad_sum_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{ "lambda": 3, "alpha": [1.0, 0.5, -0.5], "dim": 12 }"#).unwrap();
    let o = clext(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("sum"), "{}", stderr(&o));
}

#[test]
fn config_parse_error_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, "{\n  \"lambda\": 3,\n  \"alpha\": [1.0, -0.5 -0.5]\n}").unwrap();
    let o = clext(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{ "alpha": [1.0, -0.5, -0.5], "dim": 12, "scan-points": 5, "kappa": null }"#).unwrap();
    let o = clext(&["verify", "--config", cfg.to_str().unwrap(), "--dim", "18"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["header"]["dim"], 18);

    fs::write(&cfg, r#"{ "alpha": [1.0, -0.5, -0.5], "bogus": 1 }"#).unwrap();
    assert_eq!(code(&clext(&["verify", "--config", cfg.to_str().unwrap()])), 2);
}

#[test]
fn order_mismatch_is_a_validation_error() {
    let o = clext(&["pssqm-check", "--p", "3", "--alpha", "1,-0.5,-0.5"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("p + 1"), "{}", stderr(&o));
    assert_eq!(code(&clext(&["verify", "--bogus-flag"])), 2);
}

#[test]
fn unwritable_output_is_an_io_error() {
    let o = clext(&["classify", "--alpha", "1,-1", "--out", "/nonexistent-dir/x/report.json"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = clext(&[
            "pssqm-check", "--alpha", "0.3,0.1,-0.4", "--mu", "2", "--samples", "20", "--out", out.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        fs::read(out).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn sign_sampling_is_reported() {
    let o = clext(&["pssqm-check", "--alpha", "0.3,0.1,-0.4", "--mu", "0", "--samples", "60", "--seed", "7"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let s = &v["body"]["sign_sampling"];
    assert_eq!(s["samples"].as_array().unwrap().len(), 60);
    assert_eq!(s["seed"], 7);
    assert_eq!(v["header"]["seed"], 7);
    assert!(s["positivity_holds"].is_null());
    assert!(s["positive"].as_u64().unwrap() > 0 && s["negative"].as_u64().unwrap() > 0);
    assert!(s["zero"]["ground_energy"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn ssqm_both_variants() {
    let o = clext(&["ssqm", "--alpha", "0,0", "--dim", "16"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let variants = v["body"]["variants"].as_array().unwrap();
    assert_eq!(variants.len(), 2);
    let levels: Vec<f64> = variants[0]["spectrum"]["levels"].as_array().unwrap()[..5]
        .iter()
        .map(|l| l["energy"].as_f64().unwrap())
        .collect();
    assert_eq!(levels, vec![0.0, 2.0, 2.0, 4.0, 4.0]);
    assert_eq!(code(&clext(&["ssqm", "--alpha", "1,-0.5,-0.5"])), 2);
}

#[test]
fn spectrum_tables() {
    let o = clext(&["spectrum", "--alpha", "1,-0.5,-0.5", "--mu", "0", "--dim", "7", "--format", "csv"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("n,energy,sector\n0,-0.25,0\n1,2.75,1\n"), "{text}");

    let o = clext(&["spectrum", "--alpha", "1,-0.5,-0.5", "--dim", "4", "--format", "tsv"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text, "n\tenergy\tsector\n0\t1\t0\n1\t2.25\t1\n2\t2.75\t2\n3\t4\t0\n");
}

#[test]
fn classify_kinds() {
    let o = clext(&["classify", "--alpha", "-1,1"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["body"]["classification"]["kind"], "finite-dim");
    assert_eq!(v["body"]["classification"]["dim"], 1);

    let o = clext(&["classify", "--alpha", "-1.5,1.5"]);
    assert_eq!(code(&o), 1);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["body"]["classification"]["kind"], "non-unitary");

    let o = clext(&["classify", "--kappa", "0.5+0.2i,0.5-0.2i"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn dump_formats() {
    let o = clext(&["dump", "--alpha", "0,0", "--dim", "3", "--format", "tsv"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("# a 3 3\n0\t0\n"), "{text}");
    assert!(text.contains("# P1 3 3\n"));

    let o = clext(&["dump", "--alpha", "0,0", "--dim", "3"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["body"]["matrices"]["a"][0][1], serde_json::json!([1.0, 0.0]));
}
