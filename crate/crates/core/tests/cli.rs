use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn shadowlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shadowlab"))
        .args(args)
        .output()
        .expect("failed to launch shadowlab")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn windows_table() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    let res = shadowlab(&["windows", "--out", out]);
    assert_eq!(res.status.code(), Some(0));

    let table = rows(&read(&dir.path().join("windows.csv")));
    assert_eq!(table[0], ["s", "square", "sine", "sine2", "sine4", "bump"]);
    assert_eq!(table.len(), 202);
    let mid = &table[101];
    assert_eq!(mid[0].parse::<f64>().unwrap(), 0.5);
    assert!((mid[3].parse::<f64>().unwrap() - 2.0).abs() < 1e-15);
    for v in &table[1][2..] {
        assert_eq!(v.parse::<f64>().unwrap(), 0.0);
    }

    for row in rows(&read(&dir.path().join("window_means.csv")))
        .iter()
        .skip(1)
    {
        assert!(
            (row[1].parse::<f64>().unwrap() - 1.0).abs() < 1e-10,
            "{row:?}"
        );
    }
    assert!(read(&dir.path().join("windows.svg")).contains("<polyline"));
}

#[test]
fn linear_sensitivity_is_one() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("linear.cfg");
    std::fs::write(
        &cfg,
        "system = linear\na = 3\nrho = 0.5, 2\nT = 20\nwindow = sine2, bump\nmethod = both\nensemble_size = 2\n",
    )
    .unwrap();
    let res = shadowlab(&[
        "sensitivity",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(
        res.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let table = rows(&read(&dir.path().join("sensitivity.csv")));
    assert_eq!(
        table[0],
        [
            "rho",
            "window",
            "method",
            "T",
            "dt",
            "seed",
            "derivative",
            "argmin_location",
            "status"
        ]
    );
    assert_eq!(table.len(), 1 + 2 * 2 * 2 * 2);
    for row in &table[1..] {
        assert!(
            (row[6].parse::<f64>().unwrap() - 1.0).abs() < 1e-3,
            "{row:?}"
        );
        assert_eq!(row[8], "ok");
        assert_eq!(row[7].is_empty(), row[2] == "adjoint");
    }
}

#[test]
fn output_is_byte_identical_across_runs_and_pool_sizes() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let args = |dir: &TempDir, jobs: &'static str| {
        vec![
            "sensitivity".to_string(),
            "--rho".into(),
            "27:29:1".into(),
            "--T".into(),
            "10".into(),
            "--ensemble-size".into(),
            "3".into(),
            "--method".into(),
            "both".into(),
            "--seed".into(),
            "42".into(),
            "--jobs".into(),
            jobs.into(),
            "--out".into(),
            dir.path().to_str().unwrap().into(),
        ]
    };
    let run = |v: Vec<String>| {
        let refs: Vec<&str> = v.iter().map(String::as_str).collect();
        assert_eq!(shadowlab(&refs).status.code(), Some(0));
    };
    run(args(&a, "1"));
    run(args(&b, "4"));
    let first = std::fs::read(a.path().join("sensitivity.csv")).unwrap();
    assert_eq!(
        first,
        std::fs::read(b.path().join("sensitivity.csv")).unwrap()
    );
    run(args(&b, "2"));
    assert_eq!(
        first,
        std::fs::read(b.path().join("sensitivity.csv")).unwrap()
    );
}

#[test]
fn failed_row_does_not_abort_the_sweep() {
    let dir = TempDir::new().unwrap();
    let res = shadowlab(&[
        "sensitivity",
        "--rho",
        "28,100000,30",
        "--T",
        "5",
        "--window",
        "sine2",
        "--ensemble-size",
        "1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(2));
    let table = rows(&read(&dir.path().join("sensitivity.csv")));
    let status: Vec<&str> = table[1..].iter().map(|r| r[8].as_str()).collect();
    assert_eq!(status, ["ok", "failed", "ok"]);
    assert!(table[2][6].is_empty());
}

#[test]
fn ensemble_statistics() {
    let dir = TempDir::new().unwrap();
    let res = shadowlab(&[
        "ensemble",
        "--T",
        "10",
        "--window",
        "sine,sine4",
        "--ensemble-size",
        "8",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(0));
    let table = rows(&read(&dir.path().join("ensemble.csv")));
    assert_eq!(
        &table[0][..7],
        ["window", "T", "rho", "n", "std", "ci_low", "ci_high"]
    );
    assert_eq!(table.len(), 3);
    for row in &table[1..] {
        let v: Vec<f64> = row[4..7].iter().map(|x| x.parse().unwrap()).collect();
        assert_eq!(row[3], "8");
        assert!(v[1] < v[0] && v[0] < v[2], "{row:?}");
    }
}

#[test]
fn ensemble_needs_two_members() {
    let dir = TempDir::new().unwrap();
    let res = shadowlab(&[
        "ensemble",
        "--ensemble-size",
        "1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(1));
}

#[test]
fn minimal_envelope_has_three_rows() {
    let dir = TempDir::new().unwrap();
    let res = shadowlab(&[
        "envelope",
        "--T",
        "0.04",
        "--dt",
        "0.02",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(0));
    let table = rows(&read(&dir.path().join("envelope.csv")));
    assert_eq!(table[0], ["t", "norm_v"]);
    assert_eq!(table.len(), 4);
    assert!(read(&dir.path().join("envelope.svg")).starts_with("<svg"));
}

#[test]
fn linear_envelope_is_flat_in_the_interior() {
    let dir = TempDir::new().unwrap();
    let res = shadowlab(&[
        "envelope",
        "--system",
        "linear",
        "--rho",
        "1",
        "--T",
        "40",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(0));
    let table = rows(&read(&dir.path().join("envelope.csv")));
    for row in &table[1..] {
        let (t, v): (f64, f64) = (row[0].parse().unwrap(), row[1].parse().unwrap());
        if t >= 10.0 {
            assert!((v - 1.0).abs() < 1e-3, "t = {t}: {v}");
        }
    }
}

#[test]
fn config_errors_exit_with_one() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    for args in [
        vec!["sensitivity", "--rho", "35:25:1", "--out", out],
        vec!["sensitivity", "--T", "1.01", "--out", out],
        vec!["sensitivity", "--window", "hann", "--out", out],
        vec!["sensitivity", "--config", "/nonexistent/shadowlab.cfg"],
        vec!["envelope", "--rho", "27,28", "--out", out],
        vec!["frobnicate"],
    ] {
        let res = shadowlab(&args);
        assert_eq!(res.status.code(), Some(1), "{args:?}");
    }
    assert!(!dir.path().join("sensitivity.csv").exists());
}

#[test]
fn flags_override_the_config_file() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "system = linear\nT = 1000\nwindow = bump\nensemble_size = 1\n",
    )
    .unwrap();
    let res = shadowlab(&[
        "sensitivity",
        "--config",
        cfg.to_str().unwrap(),
        "--T",
        "4",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(0));
    let table = rows(&read(&dir.path().join("sensitivity.csv")));
    assert_eq!(table[1][3].parse::<f64>().unwrap(), 4.0);
    assert_eq!(table[1][1], "bump");
}
