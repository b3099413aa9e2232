use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn readout(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_readout")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Column `name` of a CSV text, one value per data row.
fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let idx = lines.next().unwrap().split(',').position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    lines.map(|l| l.split(',').nth(idx).unwrap().to_string()).collect()
}

fn number(csv: &str, name: &str) -> f64 {
    column(csv, name)[0].parse().unwrap()
}

#[test]
fn headline_snr_records() {
    let out = readout(&["snr", "--scheme", "combined"]);
    assert!(out.status.success());
    assert!((number(&stdout(&out), "snr") - 5.5).abs() < 0.2);
    let std = readout(&["snr"]);
    let s = number(&stdout(&std), "snr");
    assert!((s - 0.18).abs() < 0.02, "{s}");
}

#[test]
fn unpumped_ics_record_equals_standard() {
    let ics = stdout(&readout(&["snr", "--scheme", "ics", "--set", "ics.omega=0"]));
    let std = stdout(&readout(&["snr", "--scheme", "standard"]));
    let strip = |s: &str| s.lines().nth(1).unwrap().split_once(',').unwrap().1.to_string();
    assert_eq!(strip(&ics), strip(&std));
}

#[test]
fn exit_codes() {
    assert_eq!(readout(&["snr", "--set", "params.kapa=1"]).status.code(), Some(2));
    assert_eq!(readout(&["snr", "--scheme", "sideways"]).status.code(), Some(2));
    assert_eq!(readout(&["figure", "fig9z"]).status.code(), Some(2));
    assert_eq!(readout(&["snr", "--scheme", "ics", "--set", "ics.omega=0.3"]).status.code(), Some(3));
    assert_eq!(readout(&["snr", "--scheme", "combined", "--set", "combined.r=400"]).status.code(), Some(4));
    let bad = readout(&["oracle-check", "--scheme", "ies", "--set", "ies.r=0.5", "--perturb-noise", "0.01"]);
    assert_eq!(bad.status.code(), Some(5));
}

#[test]
fn oracle_check_passes_on_defaults() {
    for args in [
        &["oracle-check", "--scheme", "combined"][..],
        &["oracle-check", "--scheme", "ies", "--set", "ies.r=0.5", "--kappa-tau", "2"][..],
        &["oracle-check", "--scheme", "ics", "--set", "ics.r=0.4", "--steps", "4096"][..],
    ] {
        let out = readout(args);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let devs = column(&stdout(&out), "rel_deviation");
        assert!(devs.iter().all(|d| d.parse::<f64>().unwrap() < 1e-3));
    }
}

#[test]
fn config_file_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "scheme = ies\n[params]\nkappa_tau = 2\n[ies]\nr = 0.5  # squeezing\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let file_only = stdout(&readout(&["snr", "-c", cfg]));
    assert_eq!(column(&file_only, "kappa_tau"), ["2"]);
    let overridden = stdout(&readout(&["snr", "-c", cfg, "--set", "params.kappa_tau=3"]));
    assert_eq!(column(&overridden, "kappa_tau"), ["3"]);
    assert_ne!(number(&file_only, "noise_up"), number(&overridden, "noise_up"));
}

#[test]
fn sweep_is_ordered_and_independent_of_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let args = |jobs: &'static str, path: &Path| {
        let p = path.to_str().unwrap().to_string();
        let s = readout(&[
            "--jobs", jobs, "sweep", "--scheme", "combined", "--var", "kappa_tau", "--start", "0.1", "--stop", "10",
            "--count", "7", "--spacing", "log", "-o", &p, "--gnuplot",
        ]);
        assert!(s.status.success(), "{}", String::from_utf8_lossy(&s.stderr));
        fs::read_to_string(path).unwrap()
    };
    let a = args("1", &out);
    let b = args("3", &dir.path().join("sweep3.csv"));
    assert_eq!(a, b);
    let kts: Vec<f64> = column(&a, "kappa_tau").iter().map(|v| v.parse().unwrap()).collect();
    assert_eq!(kts.len(), 7);
    assert!(kts.windows(2).all(|w| w[1] > w[0]));
    let script = fs::read_to_string(dir.path().join("sweep.gp")).unwrap();
    assert!(script.contains("'sweep.csv'") && script.contains("set logscale x"));
}

#[test]
fn figures_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let run = || {
        let out = readout(&["figure", "fig2b", "--out-dir", d, "--points", "5", "--kt-min", "0.1", "--kt-max", "10"]);
        assert!(out.status.success());
        fs::read_to_string(dir.path().join("fig2b.csv")).unwrap()
    };
    let first = run();
    assert_eq!(first, run());
    // κτ = 1 is the middle point
    let row: Vec<f64> = first.lines().nth(3).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(row[0], 1.0);
    assert!((row[1] - 5.5).abs() < 0.2 && (row[2] - 0.29).abs() < 0.02 && (row[3] - 0.21).abs() < 0.02);
}

#[test]
fn photon_figure_has_critical_column() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = readout(&["figure", "fig3b", "--out-dir", d, "--points", "2", "--kt-min", "0.2", "--kt-max", "1", "--gnuplot"]);
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("fig3b.csv")).unwrap();
    assert_eq!(column(&csv, "n_c"), ["100", "100"]);
    let n: f64 = column(&csv, "n_combined")[0].parse().unwrap();
    assert!((n - 29.0).abs() < 2.0, "{n}");
    assert!(dir.path().join("fig3b.gp").exists());
}

#[test]
fn mismatch_ratio() {
    let out = readout(&["mismatch", "--delta-p", "0.1", "--delta-r", "0.1"]);
    assert!(out.status.success());
    let r = number(&stdout(&out), "snr_over_er_snr_std");
    assert!((r - 0.72).abs() < 0.04, "{r}");
}

#[test]
fn wigner_presets() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("vac");
    let out = readout(&["wigner", "--preset", "vacuum", "--prefix", prefix.to_str().unwrap(), "--resolution", "33"]);
    assert!(out.status.success());
    let grid = fs::read_to_string(dir.path().join("vac_grid.csv")).unwrap();
    let peak = column(&grid, "w").iter().map(|v| v.parse::<f64>().unwrap()).fold(0.0, f64::max);
    assert!((peak - 2.0 / std::f64::consts::PI).abs() < 1e-11);
    assert_eq!(grid.lines().count(), 1 + 3 * 2 * 33 * 33);

    let prefix = dir.path().join("s5");
    let out = readout(&["wigner", "--preset", "figS5", "--prefix", prefix.to_str().unwrap(), "--gnuplot"]);
    assert!(out.status.success());
    let ell = fs::read_to_string(dir.path().join("s5_ellipse.csv")).unwrap();
    for key in ["dxx", "dxy", "dyy"] {
        let v = column(&ell, key);
        assert!(v.chunks(2).all(|p| p[0] == p[1]), "{key}: {v:?}");
    }
    assert!(dir.path().join("s5_grid.gp").exists());

    let prefix = dir.path().join("s2");
    assert!(readout(&["wigner", "--preset", "figS2", "--prefix", prefix.to_str().unwrap()]).status.success());
    let ell = fs::read_to_string(dir.path().join("s2_ellipse.csv")).unwrap();
    let theta: Vec<f64> = column(&ell, "theta_n").iter().map(|v| v.parse().unwrap()).collect();
    assert!((theta[0] + theta[1]).abs() < 1e-6 && theta[0].abs() > 1e-3);
}
