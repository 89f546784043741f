// SPDX-License-Identifier: Apache-2.0

//! Command-line behavior: exit codes, config strictness, seed overrides and
//! the corrupted-transform negative control.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_qhartley")
}

struct Scratch(PathBuf);

impl Scratch {
    fn new(tag: &str) -> Scratch {
        let dir = std::env::temp_dir().join(format!("qhartley-cli-{tag}-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        std::fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn write(&self, name: &str, contents: &str) -> PathBuf {
        let path = self.0.join(name);
        std::fs::write(&path, contents).unwrap();
        path
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn run_in(dir: &Path, args: &[&str]) -> (i32, String, String) {
    let out = Command::new(bin())
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

const SMALL_TRAIN: &str = "\
[model]
feature = hartley
qubits = 2
ansatz = hera
depth = 1

[target]
kind = exponential
lambda = 0.5

[train]
epochs = 50
learning_rate = 0.05
seed = 3

[sample]
shots = 1000
extension = 0
seed = 5

[output]
dir = out
";

#[test]
fn verify_small_range_exits_zero() {
    let scratch = Scratch::new("verify");
    let (code, stdout, _) = run_in(&scratch.0, &["verify", "--n-min", "1", "--n-max", "2"]);
    assert_eq!(code, 0, "stdout: {stdout}");
    assert!(stdout.contains("all"));
    assert!(stdout.contains("PASS qht-dht-block n=2"));
}

#[test]
fn corrupted_qht_fails_with_check_exit_code() {
    let scratch = Scratch::new("corrupt");
    let (code, stdout, stderr) = run_in(
        &scratch.0,
        &["verify", "--n-min", "2", "--n-max", "2", "--corrupt-qht"],
    );
    assert_eq!(code, 4, "stderr: {stderr}");
    assert!(stdout.contains("FAIL qht-dht-block"));
}

#[test]
fn invalid_verify_range_is_a_usage_error() {
    let scratch = Scratch::new("range");
    let (code, _, stderr) = run_in(&scratch.0, &["verify", "--n-min", "0", "--n-max", "2"]);
    assert_eq!(code, 2, "stderr: {stderr}");
}

#[test]
fn unknown_config_key_exits_two() {
    let scratch = Scratch::new("badkey");
    let config = SMALL_TRAIN.replace("lambda = 0.5", "lambda = 0.5\nmystery = 1");
    scratch.write("config.ini", &config);
    let (code, _, stderr) = run_in(&scratch.0, &["train", "--config", "config.ini"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("mystery"), "stderr: {stderr}");
}

#[test]
fn invalid_sigma_fails_before_any_simulation() {
    let scratch = Scratch::new("sigma");
    let config = "\
[model]
feature = hartley
qubits = 3
ansatz = hera
depth = 2

[target]
kind = ou
mu = 5.0
sigma = 0.0
nu = 0.5
x_init = 24.0
t = 1.0

[train]
epochs = 10
learning_rate = 0.01
seed = 1

[output]
dir = out
";
    scratch.write("config.ini", config);
    let (code, _, stderr) = run_in(&scratch.0, &["train", "--config", "config.ini"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("sigma"), "stderr: {stderr}");
    assert!(!scratch.0.join("out").exists(), "no artifacts on config error");
}

#[test]
fn train_then_sample_roundtrip_with_overrides() {
    let scratch = Scratch::new("roundtrip");
    scratch.write("config.ini", SMALL_TRAIN);
    let (code, stdout, stderr) = run_in(&scratch.0, &["train", "--config", "config.ini"]);
    assert_eq!(code, 0, "stderr: {stderr}");
    assert!(stdout.contains("final loss"));
    for file in ["model.json", "loss.csv", "grid.csv", "report.json", "config.snapshot.ini"] {
        assert!(scratch.0.join("out").join(file).exists(), "missing {file}");
    }

    let (code, stdout, stderr) = run_in(
        &scratch.0,
        &[
            "sample",
            "--config",
            "config.ini",
            "--model",
            "out/model.json",
            "--out",
            "hist",
            "--shots",
            "2000",
            "--seed",
            "42",
            "--tvd",
        ],
    );
    assert_eq!(code, 0, "stderr: {stderr}");
    assert!(stdout.contains("tvd = "), "stdout: {stdout}");
    let raw = std::fs::read_to_string(scratch.0.join("hist/raw_histogram.csv")).unwrap();
    assert!(raw.contains("# seed = 42"));
    assert!(raw.contains("# shots = 2000"));
    assert!(raw.contains("# model_fnv1a64 = "));

    let decoded = std::fs::read_to_string(scratch.0.join("hist/decoded_histogram.csv")).unwrap();
    let mass: f64 = decoded
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("coordinate"))
        .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((mass - 1.0).abs() < 1e-9, "decoded histogram mass {mass}");
}

#[test]
fn sample_rejects_missing_model_and_kind_mismatch() {
    let scratch = Scratch::new("mismatch");
    scratch.write("config.ini", SMALL_TRAIN);
    let (code, _, _) = run_in(
        &scratch.0,
        &["sample", "--config", "config.ini", "--model", "nope.json"],
    );
    assert_ne!(code, 0);

    // train a fourier model, then refuse to sample it with the hartley path
    let fourier = SMALL_TRAIN
        .replace("feature = hartley", "feature = fourier")
        .replace("ansatz = hera", "ansatz = hea\nscheme = ry-rx");
    scratch.write("fourier.ini", &fourier);
    let (code, _, stderr) = run_in(
        &scratch.0,
        &["train", "--config", "fourier.ini", "--out", "fr"],
    );
    assert_eq!(code, 0, "stderr: {stderr}");
    let (code, _, stderr) = run_in(
        &scratch.0,
        &["sample", "--config", "config.ini", "--model", "fr/model.json"],
    );
    assert_eq!(code, 2);
    assert!(stderr.contains("hartley"), "stderr: {stderr}");
}

#[test]
fn solve_de_rejects_density_targets() {
    let scratch = Scratch::new("dekind");
    scratch.write("config.ini", SMALL_TRAIN);
    let (code, _, stderr) = run_in(&scratch.0, &["solve-de", "--config", "config.ini"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("de1 or de2"), "stderr: {stderr}");
}

#[test]
fn compare_requires_its_section() {
    let scratch = Scratch::new("cmpsec");
    scratch.write("config.ini", SMALL_TRAIN);
    let (code, _, stderr) = run_in(&scratch.0, &["compare", "--config", "config.ini"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("compare"), "stderr: {stderr}");
}

#[test]
fn json_config_is_accepted() {
    let scratch = Scratch::new("json");
    let json = r#"{
        "model": {"feature": "hartley", "qubits": 2, "ansatz": "hera", "depth": 1},
        "target": {"kind": "exponential", "lambda": 0.5},
        "train": {"epochs": 30, "learning_rate": 0.05, "seed": 3},
        "output": {"dir": "out"}
    }"#;
    scratch.write("config.json", json);
    let (code, _, stderr) = run_in(&scratch.0, &["train", "--config", "config.json"]);
    assert_eq!(code, 0, "stderr: {stderr}");
}

#[test]
fn overlap_map_writes_grid() {
    let scratch = Scratch::new("overlap");
    let (code, stdout, _) = run_in(
        &scratch.0,
        &["overlap-map", "--qubits", "2", "--step", "0.5", "--out", "om"],
    );
    assert_eq!(code, 0);
    assert!(stdout.contains("overlap-map:"));
    let text = std::fs::read_to_string(scratch.0.join("om/overlap_map.csv")).unwrap();
    assert!(text.contains("x,x_prime,overlap_sq"));
    // 7 grid points over [0, 3] at step 0.5 -> 49 data rows
    let rows = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with('x'))
        .count();
    assert_eq!(rows, 49);
}
