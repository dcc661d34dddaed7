use std::path::Path;
use std::process::Command;

use tempfile::TempDir;

fn alphadep(args: &[&str]) -> i32 {
    let status = Command::new(env!("CARGO_BIN_EXE_alphadep"))
        .args(args)
        .env("ALPHADEP_THREADS", "2")
        .output()
        .expect("binary runs");
    status.status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

const SMALL_SIM: &str = r#"{
    "map": {"kind": "lsv", "gamma": 0.25},
    "observable": {"kind": "indicator", "lo": 0.5, "hi": 1.0},
    "sim": {"n_grid": [256, 512, 1024, 2048], "replicas": 200, "seed": 11, "p_list": [2.0],
            "center_budget": 2000000}
}"#;

#[test]
fn help_and_bad_invocations() {
    assert_eq!(alphadep(&["--help"]), 0);
    assert_eq!(alphadep(&["frobnicate"]), 2);
    assert_eq!(alphadep(&["regimes", "--gamma", "0.25"]), 2);
    assert_eq!(alphadep(&["regimes", "--gamma", "1.5", "--b", "0", "--p", "2"]), 2);
}

#[test]
fn regimes_writes_one_row_per_combination() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let code = alphadep(&[
        "regimes", "--gamma", "0.25,0.5", "--b", "0,0.1", "--p", "2,4", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let csv = read(&out, "regimes.csv");
    assert_eq!(csv.lines().count(), 1 + 8);
    assert!(out.join("manifest.json").exists());
}

#[test]
fn zero_quantile_gives_zero_integral_bounds() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "zero.json",
        r#"{
            "alpha": {"kind": "power_law", "c": 1.0, "gamma": 0.25},
            "quantile": {"kind": "power_law", "scale": 0.0, "b": 0.0},
            "bounds": {"n_grid": [10, 100], "p": 3.0, "x_grid": [1.0, 5.0]}
        }"#,
    );
    let out = dir.path().join("out");
    assert_eq!(alphadep(&["bounds", "--config", &cfg, "--out", out.to_str().unwrap()]), 0);
    let mut reader = csv::Reader::from_path(out.join("bounds.csv")).unwrap();
    let value_col = reader.headers().unwrap().iter().position(|h| h == "value").unwrap();
    let mut rows = 0;
    for rec in reader.records() {
        let rec = rec.unwrap();
        let v: f64 = rec[value_col].parse().unwrap();
        assert_eq!(v, 0.0, "row {rec:?}");
        rows += 1;
    }
    assert!(rows > 0);
    let manifest: serde_json::Value = serde_json::from_str(&read(&out, "manifest.json")).unwrap();
    assert_eq!(manifest["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn malformed_config_writes_nothing() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "bad.json", "{\"map\": {\"kind\": \"lsv\", ");
    let out = dir.path().join("out");
    assert_eq!(alphadep(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()]), 2);
    assert_eq!(alphadep(&["bounds", "--config", &cfg, "--out", out.to_str().unwrap()]), 2);
    assert!(!out.exists());
    let missing = dir.path().join("nope.json");
    assert_eq!(alphadep(&["simulate", "--config", missing.to_str().unwrap(), "--out", out.to_str().unwrap()]), 2);
}

#[test]
fn simulate_is_reproducible_across_thread_counts() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "sim.json", SMALL_SIM);
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let out = dir.path().join(format!("t{threads}"));
        let code = alphadep(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap(), "--threads", threads]);
        assert_eq!(code, 0);
        outputs.push(read(&out, "simulate.csv"));
    }
    assert_eq!(outputs[0], outputs[1]);
    assert!(outputs[0].starts_with("n,statistic,p_or_x_or_beta,estimate,stderr,replicas,seed,flags"));
}

#[test]
fn report_is_idempotent() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "sim.json", SMALL_SIM);
    let run = dir.path().join("run");
    let code = alphadep(&["verify", "moments", "--config", &cfg, "--out", run.to_str().unwrap()]);
    assert!(code == 0 || code == 1, "verify exit {code}");
    let mut reports = Vec::new();
    for name in ["r1", "r2"] {
        let out = dir.path().join(name);
        let code = alphadep(&["report", "--inputs", run.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert!(code == 0 || code == 1, "report exit {code}");
        reports.push(read(&out, "report.json"));
    }
    assert_eq!(reports[0], reports[1]);
    let report: serde_json::Value = serde_json::from_str(&reports[0]).unwrap();
    assert_eq!(report["verdicts"].as_array().unwrap().len(), 1);
}

#[test]
fn report_without_inputs_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let empty = dir.path().join("empty");
    std::fs::create_dir(&empty).unwrap();
    let out = dir.path().join("out");
    assert_eq!(alphadep(&["report", "--inputs", empty.to_str().unwrap(), "--out", out.to_str().unwrap()]), 2);
    assert!(!out.exists());
}

#[test]
fn regimes_example_row() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let code = alphadep(&["regimes", "--gamma", "0.25", "--b", "0", "--p", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let mut reader = csv::Reader::from_path(out.join("regimes.csv")).unwrap();
    let headers = reader.headers().unwrap().clone();
    let row = reader.records().next().unwrap().unwrap();
    let field = |name: &str| row[headers.iter().position(|h| h == name).unwrap()].to_string();
    assert_eq!(field("moment_exponent").parse::<f64>().unwrap(), 1.0);
    assert_eq!(field("holder_delta").parse::<f64>().unwrap(), 0.25);
    assert_eq!(field("ld_p").parse::<f64>().unwrap(), 4.0);
}
