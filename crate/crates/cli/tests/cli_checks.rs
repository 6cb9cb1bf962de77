//! End-to-end checks of the `sim` binary: exit codes, determinism of cheap
//! subcommands, the forced validate failure, and the T' refinement path on a
//! reduced scenario.

use std::fs;
use std::path::Path;
use std::process::Command;

use enantiosim::dynamics::{HamiltonianKind, RunSpec, TimeGrid};
use enantiosim::model::DecoherenceRates;
use enantiosim_cli::commands::{extract_tprime, run_pair_with_window};

fn sim_bin() -> &'static str {
    env!("CARGO_BIN_EXE_sim")
}

fn run_sim(args: &[&str]) -> std::process::Output {
    Command::new(sim_bin())
        .args(args)
        .output()
        .expect("sim binary runs")
}

#[test]
fn surface_a1_deterministic_and_complete() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [dir_a.path(), dir_b.path()] {
        let out = run_sim(&["surface-a1", "--out", dir.to_str().unwrap()]);
        assert!(out.status.success());
    }
    let a = fs::read(dir_a.path().join("surface_a1.csv")).unwrap();
    let b = fs::read(dir_b.path().join("surface_a1.csv")).unwrap();
    assert_eq!(a, b, "surface CSV must be byte-identical across runs");
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().count(), 1 + 21 * 21);
    assert!(text.starts_with("A2,T,A1_min\n"));
    // rows past the valid branch of the constraint emit empty cells
    assert!(
        text.lines().any(|l| l.ends_with(',')),
        "expected sentinel cells for singular grid points"
    );
    assert!(dir_a.path().join("surface_a1.svg").exists());
    assert!(dir_a.path().join("manifest.json").exists());
}

#[test]
fn invalid_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"params": {"Delta": -3.0}}"#).unwrap();
    let out = run_sim(&[
        "surface-a1",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));

    let out = run_sim(&["surface-a1", "--config", "/nonexistent.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_fails_with_tiny_truncation() {
    // N = 5 cannot hold the working displacement; the validate suite must
    // report the breach and exit 4
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("n5.json");
    fs::write(
        &cfg,
        r#"{"params": {"Delta": 20.0, "delta": 1.0, "A1": 0.15, "A2": 2.5, "T": 250.0, "N": 5}}"#,
    )
    .unwrap();
    let out = run_sim(&[
        "validate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));
    let report = fs::read_to_string(dir.path().join("validate_report.txt")).unwrap();
    assert!(report.contains("FAIL"));
    assert!(report.contains("fock_truncation_tail"));
}

#[test]
fn timeseries_small_scenario_has_schema() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.json");
    // a shortened run keeps this test cheap
    fs::write(
        &cfg,
        r#"{"params": {"Delta": 20.0, "delta": 1.0, "A1": 0.15, "A2": 2.5, "T": 25.0, "N": 12}}"#,
    )
    .unwrap();
    let out = run_sim(&[
        "timeseries",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("timeseries.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,X_L_half,X_R_half,P1_L,P1_R,nbar_L,nbar_R"
    );
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    // t = 0 row: vacuum start
    assert_eq!(first[0].parse::<f64>().unwrap(), 0.0);
    assert_eq!(first[1].parse::<f64>().unwrap(), 0.0);
    assert!(!text.contains('\r'));
}

#[test]
fn effective_mode_flag_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_sim(&[
        "timeseries",
        "--mode",
        "effective",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("timeseries.csv")).unwrap();
    let last = text.lines().last().unwrap();
    let x_l: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
    assert!((x_l - 1.98858649).abs() < 1e-4, "effective X_L/2 = {x_l}");
}

#[test]
fn tprime_refinement_on_reduced_scenario() {
    // decoherence strong enough that the peak sits well before t_end
    let mut spec = RunSpec::nominal();
    spec.params.total_time = 50.0;
    spec.params.fock_cutoff = 12;
    spec.rates = DecoherenceRates::uniform(0.05);
    spec.grid = Some(TimeGrid {
        dt: 2e-3,
        t_end: 50.0,
        sample_stride: 25,
        dense_window: None,
    });
    spec.mode = HamiltonianKind::Full;
    let coarse = enantiosim::dynamics::run_pair(&spec, None).unwrap();
    let (t_coarse, d_coarse) =
        enantiosim::dynamics::scan_tprime(&coarse.times, &coarse.d_series);
    let (t_fine, d_fine) = extract_tprime(&spec, &coarse).unwrap();
    assert!((t_fine - t_coarse).abs() <= 0.101, "refined peak strays");
    assert!(d_fine >= d_coarse - 1e-12, "refinement must not lose height");
    // the dense window really is step-resolved
    let windowed = run_pair_with_window(&spec, (t_coarse - 0.5, t_coarse + 0.5)).unwrap();
    let dense = windowed.dense.unwrap();
    assert!(dense.times.len() > 400);
    let dt_observed = dense.times[1] - dense.times[0];
    assert!((dt_observed - 2e-3).abs() < 1e-12);
}

fn read_manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn manifest_records_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_sim(&[
        "surface-a1",
        "--out",
        dir.path().to_str().unwrap(),
        "--seed",
        "31",
    ]);
    assert!(out.status.success());
    let m = read_manifest(dir.path());
    assert_eq!(m["command"], "surface-a1");
    assert_eq!(m["base_seed"], 31);
    assert_eq!(m["code_version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(m["config_sha256"].as_str().unwrap().len(), 64);
    assert!(m["wall_clock_seconds"].as_f64().unwrap() >= 0.0);
    let outputs = m["outputs"].as_array().unwrap();
    assert!(outputs.iter().any(|v| v == "surface_a1.csv"));
}
