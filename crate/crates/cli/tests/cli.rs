use std::fs;

use assert_cmd::Command;
use serde_json::Value;

fn moebius() -> Command {
    Command::cargo_bin("moebius").unwrap()
}

fn numbers(v: &Value) -> Vec<f64> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.to_string().parse().unwrap())
        .collect()
}

#[test]
fn help_exits_zero() {
    let out = moebius().arg("--help").assert().success();
    let text = String::from_utf8(out.get_output().stdout.clone()).unwrap();
    for cmd in [
        "geometry",
        "classical",
        "spectrum-free",
        "spectrum-flux",
        "spectrum-coulomb",
        "validate",
    ] {
        assert!(text.contains(cmd), "{cmd} missing from help");
    }
}

#[test]
fn free_spectrum_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    moebius()
        .args(["spectrum-free", "--max-n", "2", "--out"])
        .arg(dir.path())
        .assert()
        .success();
    let doc: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("spectrum_free.json")).unwrap())
            .unwrap();
    assert_eq!(
        numbers(&doc["eigenvalues"]),
        vec![0.0, 0.125, 0.125, 0.5, 0.5]
    );
    assert_eq!(doc["params"]["max_n"], 2);
    assert_eq!(doc["grid_n"], 0);
}

#[test]
fn negative_grid_is_usage_error_naming_flag() {
    let out = moebius()
        .args(["spectrum-free", "--grid", "-4"])
        .assert()
        .code(2);
    let err = String::from_utf8(out.get_output().stderr.clone()).unwrap();
    assert!(err.contains("--grid"), "{err}");
}

#[test]
fn odd_grid_and_unknown_flag_rejected() {
    moebius()
        .args(["spectrum-flux", "--grid", "101"])
        .assert()
        .code(2);
    let out = moebius()
        .args(["geometry", "--colour", "red"])
        .assert()
        .code(2);
    let err = String::from_utf8(out.get_output().stderr.clone()).unwrap();
    assert!(err.contains("--colour"), "{err}");
}

#[test]
fn solver_error_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = moebius()
        .args(["geometry", "--radius", "1", "--half-width", "2", "--out"])
        .arg(dir.path())
        .assert()
        .code(1);
    let err = String::from_utf8(out.get_output().stderr.clone()).unwrap();
    assert!(
        err.contains("half_width") || err.contains("half-width"),
        "{err}"
    );
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# ring settings\nmax_n = 4\nformat = csv\n").unwrap();
    moebius()
        .args(["spectrum-free", "--config"])
        .arg(&cfg)
        .args(["--max-n", "1", "--out"])
        .arg(dir.path())
        .assert()
        .success();
    let csv = fs::read_to_string(dir.path().join("spectrum_free.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 3);
    assert!(csv.starts_with("level,energy\n"));
}

#[test]
fn config_with_unknown_key_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "speed = 3\n").unwrap();
    moebius()
        .args(["spectrum-free", "--config"])
        .arg(&cfg)
        .assert()
        .code(2);
    moebius()
        .args(["spectrum-free", "--config", "/nonexistent/x.cfg"])
        .assert()
        .code(2);
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    moebius()
        .args(["geometry", "--nu", "8", "--nv", "3"])
        .env("MOEBIUS_OUT_DIR", dir.path())
        .assert()
        .success();
    let csv = fs::read_to_string(dir.path().join("mesh.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("u,v,x,y,z,nx,ny,nz"));
    assert_eq!(csv.lines().count(), 1 + 8 * 3);
}

#[test]
fn flux_zero_matches_free_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    moebius()
        .args([
            "spectrum-flux",
            "--flux",
            "0",
            "--grid",
            "2048",
            "--levels",
            "5",
            "--out",
        ])
        .arg(dir.path())
        .assert()
        .success();
    moebius()
        .args(["spectrum-free", "--max-n", "2", "--out"])
        .arg(dir.path())
        .assert()
        .success();
    let read = |name: &str| -> Value {
        serde_json::from_str(&fs::read_to_string(dir.path().join(name)).unwrap()).unwrap()
    };
    let flux = numbers(&read("spectrum_flux.json")["eigenvalues"]);
    let free = numbers(&read("spectrum_free.json")["eigenvalues"]);
    for (a, b) in flux.iter().zip(&free) {
        assert!((a - b).abs() / b.max(0.125) < 1e-4, "{a} vs {b}");
    }
}

#[test]
fn flux_sweep_is_ordered_by_a() {
    let dir = tempfile::tempdir().unwrap();
    moebius()
        .args([
            "spectrum-flux",
            "--flux-from",
            "0",
            "--flux-to",
            "1",
            "--flux-steps",
            "5",
        ])
        .args(["--grid", "64", "--levels", "3", "--out"])
        .arg(dir.path())
        .assert()
        .success();
    let csv = fs::read_to_string(dir.path().join("flux_sweep.csv")).unwrap();
    let a: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(a, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    assert!(csv.starts_with("A,E_0,E_1,E_2\n"));
}

#[test]
fn coulomb_json_reports_both_readings() {
    let dir = tempfile::tempdir().unwrap();
    moebius()
        .args(["spectrum-coulomb", "--k", "2", "--out"])
        .arg(dir.path())
        .assert()
        .success();
    let doc: Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("spectrum_coulomb.json")).unwrap(),
    )
    .unwrap();
    let solver = numbers(&doc["eigenvalues"]);
    let closed = numbers(&doc["closed_form"]);
    assert_eq!(solver.len(), 3);
    for (s, c) in solver.iter().zip(&closed) {
        assert!((s - c).abs() / c.abs() < 1e-3);
    }
    // n = 1 is excluded by the restriction rule at k = 2
    assert_eq!(doc["integer_n_levels"][0]["n"], 2);
    assert!(numbers(&doc["signed_deviation"]).iter().all(|d| *d != 0.0));
}

#[test]
fn classical_writes_trajectory_and_log() {
    let dir = tempfile::tempdir().unwrap();
    moebius()
        .args([
            "classical",
            "--steps",
            "200",
            "--gravity",
            "1",
            "--p-theta",
            "2",
            "--out",
        ])
        .arg(dir.path())
        .assert()
        .success();
    let csv = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 201);
    assert_eq!(csv.lines().next().unwrap().split(',').count(), 18);
    let log: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("residuals.json")).unwrap())
            .unwrap();
    assert!(log.is_array() || log.is_object());
}

#[test]
fn every_json_output_reparses() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["geometry", "--format", "json", "--nu", "6", "--nv", "2"],
        vec!["spectrum-free", "--grid", "32", "--max-n", "2"],
        vec![
            "spectrum-flux",
            "--flux-from",
            "0",
            "--flux-to",
            "0.5",
            "--flux-steps",
            "2",
            "--grid",
            "32",
            "--levels",
            "2",
            "--format",
            "json",
        ],
    ] {
        moebius()
            .args(&args)
            .arg("--out")
            .arg(dir.path())
            .assert()
            .success();
    }
    for name in ["mesh.json", "spectrum_free.json", "flux_sweep.json"] {
        let text = fs::read_to_string(dir.path().join(name)).unwrap();
        assert!(text.ends_with('\n') && !text.contains('\r'));
        serde_json::from_str::<Value>(&text).unwrap();
    }
}
