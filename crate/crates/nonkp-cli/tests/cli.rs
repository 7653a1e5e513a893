//! End-to-end checks of the `nonkp` binary: artifact layout, determinism,
//! failure paths, and exit codes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn nonkp() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nonkp"))
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("run.cfg");
    fs::write(&path, body).unwrap();
    path
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().unwrap();
    assert!(
        out.status.success(),
        "expected success, got {:?}\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

const SIM_CFG: &str = "\
[grid]
nx = 16
ny = 16

[run]
t_end = 0.2
snapshot_stride = 2

[scenario]
amplitude = 0.05
seed = 3
";

#[test]
fn simulate_writes_deterministic_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SIM_CFG);
    let out_a = tmp.path().join("a");
    let out_b = tmp.path().join("b");
    run_ok(nonkp().args(["simulate", "--config"]).arg(&cfg).arg("--out").arg(&out_a));
    run_ok(nonkp().args(["simulate", "--config"]).arg(&cfg).arg("--out").arg(&out_b));

    // identical bytes in every artifact
    let mut names: Vec<String> = fs::read_dir(out_a.join("snapshots"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert!(names.contains(&"snap_000000.json".to_string()));
    for name in &names {
        let a = fs::read(out_a.join("snapshots").join(name)).unwrap();
        let b = fs::read(out_b.join("snapshots").join(name)).unwrap();
        assert_eq!(a, b, "snapshot {name} differs between runs");
    }
    for csv in ["diagnostics.csv", "mass.csv"] {
        let a = fs::read(out_a.join(csv)).unwrap();
        let b = fs::read(out_b.join(csv)).unwrap();
        assert_eq!(a, b, "{csv} differs between runs");
    }

    // sidecar holds u then v as little-endian f64, row-major
    let bin = fs::read(out_a.join("snapshots/snap_000000.bin")).unwrap();
    assert_eq!(bin.len(), 2 * 16 * 16 * 8);
    let meta: serde_json::Value =
        serde_json::from_slice(&fs::read(out_a.join("snapshots/snap_000000.json")).unwrap())
            .unwrap();
    assert_eq!(meta["grid"]["nx"], 16);
    assert_eq!(meta["samples_per_field"], 256);
    assert_eq!(meta["scheme"], "diagonal-ifrk4");
}

#[test]
fn seed_flag_overrides_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SIM_CFG);
    let out_a = tmp.path().join("a");
    let out_b = tmp.path().join("b");
    run_ok(nonkp().args(["simulate", "--config"]).arg(&cfg).arg("--out").arg(&out_a));
    run_ok(
        nonkp()
            .args(["simulate", "--seed", "99", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out_b),
    );
    let a = fs::read(out_a.join("snapshots/snap_000000.bin")).unwrap();
    let b = fs::read(out_b.join("snapshots/snap_000000.bin")).unwrap();
    assert_ne!(a, b, "different seeds must change the data");
}

#[test]
fn blow_up_produces_failure_json_and_nonzero_exit() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SIM_CFG);
    let out = tmp.path().join("boom");
    let result = nonkp()
        .args(["simulate", "--set", "scenario.amplitude=1e4", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(result.status.code(), Some(1));
    let failure: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join("failure.json")).unwrap()).unwrap();
    assert_eq!(failure["scenario"], "simulate");
    assert_eq!(failure["reason"], "blow-up");
    assert!(failure["t"].as_f64().unwrap() >= 0.0);
}

#[test]
fn missing_grid_size_is_named() {
    let tmp = tempfile::tempdir().unwrap();
    let out = nonkp()
        .arg("simulate")
        .arg("--out")
        .arg(tmp.path().join("x"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("grid.nx"), "stderr: {stderr}");
}

#[test]
fn unknown_key_is_rejected_by_name() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &format!("{SIM_CFG}\n[run]\nwibble = 1\n"));
    let out = nonkp()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(tmp.path().join("x"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("run.wibble"), "stderr: {stderr}");
}

#[test]
fn dispersion_table_small_grid_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "[grid]\nnx = 32\nny = 32\n\n[scenario]\nmode_range = 4\n",
    );
    let out_dir = tmp.path().join("disp");
    run_ok(
        nonkp()
            .args(["dispersion-table", "--threads", "2", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out_dir),
    );
    let csv = fs::read_to_string(out_dir.join("dispersion.csv")).unwrap();
    // header + (2*4+1)^2 modes x 2 branches
    assert_eq!(csv.lines().count(), 1 + 81 * 2);
    for line in csv.lines().skip(1) {
        let err: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(err <= 1e-10);
    }
}

#[test]
fn dn_verify_passes_at_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("dn");
    run_ok(nonkp().arg("dn-verify").arg("--out").arg(&out_dir));
    let csv = fs::read_to_string(out_dir.join("dn_verify.csv")).unwrap();
    assert!(csv.lines().count() > 1);
}

#[test]
fn conservation_passes_on_reduced_settings() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "[grid]\nnx = 32\nny = 32\n\n[run]\nt_end = 2.0\ndiagnostics_stride = 1\n",
    );
    let out_dir = tmp.path().join("cons");
    run_ok(
        nonkp()
            .args(["conservation", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out_dir),
    );
    let csv = fs::read_to_string(out_dir.join("conservation.csv")).unwrap();
    assert!(csv.lines().count() > 10);
}

#[test]
fn out_dir_honors_environment_root() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SIM_CFG);
    run_ok(
        nonkp()
            .env("NONKP_OUT_DIR", tmp.path().join("root"))
            .args(["simulate", "--config"])
            .arg(&cfg),
    );
    assert!(tmp.path().join("root/simulate/diagnostics.csv").exists());
}
