// Copyright 2026 The lrsim Authors
// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = r#"
version = 1
experiment = "quasilocal"
seed = 11

[model.geometry]
kind = "chain"
n = 4

[model.preset]
kind = "dissipative-ising"
params = { gamma = 0.3 }

[quasilocal]
observable = { sites = [1], op = "Z" }
radii = [1, 2]
lags = [0.0, 0.2]

[sweep]
base = "quasilocal"
parameter = "model.preset.params.gamma"
values = [0.1, 0.4, 0.8]
"#;

fn lrsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lrsim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path) -> String {
    let p = dir.join("small.toml");
    fs::write(&p, SMALL).unwrap();
    p.display().to_string()
}

#[test]
fn quasilocal_run_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let out = dir.path().join("out");
    let o = lrsim(&["quasilocal", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("quasilocal.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("radius,D,r,t,t_minus_r,measured,bound,ratio"));
    assert_eq!(lines.count(), 4);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("quasilocal.summary.json")).unwrap()).unwrap();
    assert_eq!(summary["config_sha256"].as_str().unwrap().len(), 64);
    assert_eq!(summary["passed"], serde_json::Value::Bool(true));
    assert_eq!(summary["constants"]["z_max"], serde_json::json!(5.0));
}

#[test]
fn precondition_failure_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let out = dir.path().join("out");
    // Radius 0 gives D = 1, outside the theorem's range for kappa = 0.
    let o = lrsim(&[
        "quasilocal",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--override",
        "quasilocal.radii=[0]",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("PRECONDITION"));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let out = dir.path().join("out");
    let o = lrsim(&["lr", "--config", &cfg, "--out", out.to_str().unwrap(), "--override", "lr.lagz=[0.1]"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("lagz"));
    let o = lrsim(&["selftest", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = lrsim(&[
        "lr",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--override",
        "limits.max_qubits=3",
        "--override",
        "lr.observable={ sites = [1], op = \"Z\" }",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("max_qubits"));
}

#[test]
fn sweep_is_ordered_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let mut csvs = Vec::new();
    for (k, jobs) in ["1", "3"].iter().enumerate() {
        let out = dir.path().join(format!("out{k}"));
        let o = lrsim(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap(), "--jobs", jobs]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        csvs.push(fs::read(out.join("sweep.csv")).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
    let text = String::from_utf8(csvs.remove(0)).unwrap();
    let points: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(points.len(), 12);
    assert!(points.windows(2).all(|w| w[0] <= w[1]));
    assert!(text.lines().nth(1).unwrap().starts_with("0,0.1,"));
}

#[test]
fn simulate_pictures_agree() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let out = dir.path().join("out");
    let o = lrsim(&[
        "simulate",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--override",
        "simulate.state=\"+01-\"",
        "--seed",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("simulate.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("toml") {
            continue;
        }
        let text = fs::read_to_string(&path).unwrap();
        lrsim::harness::Config::from_toml_str(&text, &[])
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        seen += 1;
    }
    assert!(seen >= 3);
}
