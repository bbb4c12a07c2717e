use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use driftspec::bounds::catalog;
use driftspec::report::Report;
use driftspec::spectra::Spectrum;

fn driftspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_driftspec"))
        .args(args)
        .env_remove("DRIFTSPEC_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_square(dir: &Path) -> String {
    let out = driftspec(&["spectrum", "--family", "box", "--sides", "1,1", "--count", "12"]);
    assert!(out.status.success());
    let path = dir.join("square.json");
    fs::write(&path, &out.stdout).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn list_checks_covers_the_catalog() {
    let out = driftspec(&["list-checks"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), catalog().len());
    let row = text
        .lines()
        .find(|l| l.starts_with("thm7.7 "))
        .expect("isoparametric row");
    assert!(row.contains("n0"), "{row}");
}

#[test]
fn list_checks_json_parses() {
    let out = driftspec(&["list-checks", "--json"]);
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rows.len(), catalog().len());
    assert!(rows.iter().all(|r| r["id"].is_string() && r["requires"].is_array()));
}

#[test]
fn spectrum_output_is_a_valid_spectrum() {
    let out = driftspec(&[
        "spectrum",
        "--family",
        "interval",
        "--length",
        "3.141592653589793",
        "--drift",
        "2",
        "--count",
        "4",
    ]);
    let s = Spectrum::from_json(&stdout(&out)).unwrap();
    let expected = [2.0, 5.0, 10.0, 17.0];
    for (v, e) in s.expanded().iter().zip(expected) {
        assert!((v - e).abs() < 1e-12, "{v} vs {e}");
    }
}

#[test]
fn csv_format_reads_back() {
    let out = driftspec(&[
        "spectrum", "--family", "sphere", "--dim", "2", "--count", "3", "--format", "csv",
    ]);
    let s = Spectrum::read_csv(out.stdout.as_slice(), "csv").unwrap();
    assert_eq!(s.values(), &[0.0, 2.0, 6.0]);
    assert_eq!(s.multiplicities(), &[1, 3, 5]);
}

#[test]
fn check_reports_each_index() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_square(dir.path());
    let out = driftspec(&["check", &path, "--id", "yang1", "--index", "1..5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.starts_with("yang1")).count(), 5);
    assert!(text.lines().all(|l| l.contains("Holds")), "{text}");
}

#[test]
fn check_json_mode_emits_results() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_square(dir.path());
    let out = driftspec(&["check", &path, "--id", "ab", "--json"]);
    assert!(out.status.success());
    let results: Vec<serde_json::Value> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(results.len(), 1);
    assert_eq!(results[0]["check_id"], "ab");
    assert_eq!(results[0]["status"], "holds");
}

#[test]
fn failing_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    fs::write(&path, "index,value,multiplicity\n1,1,1\n2,100,1\n3,101,1\n").unwrap();
    let out = driftspec(&["check", path.to_str().unwrap(), "--id", "ab", "--dim", "2"]);
    assert_eq!(out.status.code(), Some(1), "{}", stdout(&out));
}

#[test]
fn unknown_check_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_square(dir.path());
    let out = driftspec(&["check", &path, "--id", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope"));
}

#[test]
fn missing_constant_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_square(dir.path());
    let out = driftspec(&["check", &path, "--id", "cor6.5a", "--index", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[solver]\nunknown_key = 3\n").unwrap();
    let out = driftspec(&["--config", cfg.to_str().unwrap(), "list-checks"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "not = [valid\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_driftspec"))
        .args(["run", "--bundled", "focal"])
        .env("DRIFTSPEC_CONFIG", &cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bundled_run_writes_artifacts_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for d in [&a, &b] {
        let out = driftspec(&["--out", d.to_str().unwrap(), "run", "--bundled", "square_dirichlet"]);
        assert_eq!(out.status.code(), Some(0));
    }
    let json = fs::read_to_string(a.join("square_dirichlet.json")).unwrap();
    assert_eq!(json, fs::read_to_string(b.join("square_dirichlet.json")).unwrap());
    let report = Report::from_json(&json).unwrap();
    assert!(report.summary.all_hold());
    assert_eq!(report.config_hash.len(), 64);
    let csv = fs::read_to_string(a.join("square_dirichlet_checks.csv")).unwrap();
    assert_eq!(csv.lines().count(), report.checks.len() + 1);
    assert!(a.join("square_dirichlet_eigenvalues.csv").exists());
    assert!(a.join("square_dirichlet_margins_yang1.csv").exists());
}

#[test]
fn seed_changes_the_hash() {
    let run = |seed: &str| {
        let out = driftspec(&["--seed", seed, "run", "--bundled", "focal"]);
        Report::from_json(&stdout(&out)).unwrap().config_hash
    };
    assert_eq!(run("1"), run("1"));
    assert_ne!(run("1"), run("2"));
}

#[test]
fn plot_data_extracts_selected_series() {
    let dir = tempfile::tempdir().unwrap();
    let out = driftspec(&[
        "--out",
        dir.path().to_str().unwrap(),
        "run",
        "--bundled",
        "square_dirichlet",
    ]);
    assert!(out.status.success());
    let report = dir.path().join("square_dirichlet.json");
    let plots = dir.path().join("plots");
    let out = driftspec(&[
        "--out",
        plots.to_str().unwrap(),
        "plot-data",
        report.to_str().unwrap(),
        "--select",
        "margins:yang2",
    ]);
    assert!(out.status.success());
    let csv = fs::read_to_string(plots.join("square_dirichlet_margins_yang2.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("k,margin"));
    assert!(csv.lines().count() > 5);

    let out = driftspec(&[
        "--out",
        plots.to_str().unwrap(),
        "plot-data",
        report.to_str().unwrap(),
        "--select",
        "margins:zzz",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("matched no data"));
}

#[test]
fn solve_exports_mesh_and_matrices() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = dir.path().join("sphere.off");
    let mats = dir.path().join("matrices.coo");
    let out = driftspec(&[
        "solve",
        "--mesh",
        "icosphere",
        "--level",
        "1",
        "--count",
        "4",
        "--export-mesh",
        mesh.to_str().unwrap(),
        "--export-matrices",
        mats.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let s = Spectrum::from_json(&stdout(&out)).unwrap();
    assert_eq!(s.expanded()[0], 0.0);
    assert!(fs::read_to_string(&mesh).unwrap().starts_with("OFF"));
    assert!(!fs::read_to_string(&mats).unwrap().is_empty());
}
