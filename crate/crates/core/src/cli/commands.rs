use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::config::{ExperimentConfig, SystemKind};
use crate::ensemble::{estimate, initial_condition, member_seed, RunSettings};
use crate::error::{Error, Result};
use crate::integrate::{fmt_f64, integrate_trajectory};
use crate::report::{Method, SensitivityReport};
use crate::stats;
use crate::svg::{LinePlot, Series};
use crate::system::{linear_test_system, DynamicalSystem, Lorenz63};
use crate::tangent::{solve_tangent, tangent_sensitivity};
use crate::window::{WindowFunction, WindowKind};

/// Confidence level of the ensemble standard-deviation intervals.
pub const CI_LEVEL: f64 = 0.95;
/// Sample count of the window table.
pub const WINDOW_TABLE_POINTS: usize = 201;

/// What a command produced. `failed_rows > 0` maps to exit status 2.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub failed_rows: usize,
}

fn build_system(cfg: &ExperimentConfig) -> Result<Box<dyn DynamicalSystem>> {
    Ok(match cfg.system {
        SystemKind::Lorenz => Box::new(Lorenz63::new()),
        SystemKind::Linear => Box::new(linear_test_system(cfg.linear_rate)?),
    })
}

fn settings(cfg: &ExperimentConfig) -> RunSettings {
    RunSettings {
        burn_in: cfg.burn_in,
        horizon: cfg.horizon,
        dt: cfg.dt,
    }
}

fn create(dir: &Path, name: &str) -> Result<(PathBuf, csv::Writer<BufWriter<File>>)> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(name);
    let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
    Ok((path, csv::Writer::from_writer(BufWriter::new(file))))
}

fn finish<W: Write>(path: &Path, mut w: csv::Writer<W>) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

struct Task {
    param: f64,
    seed: u64,
}

/// Every parameter value crossed with every ensemble member, in output order.
fn tasks(cfg: &ExperimentConfig) -> Vec<Task> {
    cfg.params
        .values()
        .into_iter()
        .flat_map(|param| {
            (0..cfg.ensemble_size).map(move |k| Task {
                param,
                seed: member_seed(cfg.seed, k),
            })
        })
        .collect()
}

fn run_tasks(
    cfg: &ExperimentConfig,
    sys: &dyn DynamicalSystem,
    windows: &[WindowFunction],
) -> Vec<(Task, Result<Vec<SensitivityReport>>)> {
    let run = settings(cfg);
    tasks(cfg)
        .into_par_iter()
        .map(|t| {
            let u0 = initial_condition(t.seed, sys.dim());
            let res = estimate(sys, t.param, &u0, &run, windows, &cfg.methods);
            (t, res)
        })
        .collect()
}

/// One row per parameter value, member, window and method:
/// `rho,window,method,T,dt,seed,derivative,argmin_location,status`.
pub fn cmd_sensitivity(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    let sys = build_system(cfg)?;
    let windows = cfg.window_functions();
    let results = run_tasks(cfg, sys.as_ref(), &windows);

    let (path, mut w) = create(&cfg.output_dir, "sensitivity.csv")?;
    w.write_record([
        "rho",
        "window",
        "method",
        "T",
        "dt",
        "seed",
        "derivative",
        "argmin_location",
        "status",
    ])?;
    let mut failed = 0;
    for (task, res) in &results {
        let head = |win: &str, m: Method| {
            vec![
                fmt_f64(task.param),
                win.to_string(),
                m.label().to_string(),
                fmt_f64(cfg.horizon),
                fmt_f64(cfg.dt),
                task.seed.to_string(),
            ]
        };
        match res {
            Ok(reps) => {
                for r in reps {
                    let mut row = head(&r.window_name, r.method);
                    row.push(fmt_f64(r.derivative));
                    row.push(r.argmin_location.map(fmt_f64).unwrap_or_default());
                    row.push("ok".into());
                    w.write_record(&row)?;
                }
            }
            Err(e) => {
                eprintln!("rho = {} seed = {}: {e}", task.param, task.seed);
                for win in &windows {
                    for &m in &cfg.methods {
                        let mut row = head(win.name(), m);
                        row.extend([String::new(), String::new(), "failed".into()]);
                        w.write_record(&row)?;
                        failed += 1;
                    }
                }
            }
        }
    }
    finish(&path, w)?;
    Ok(Outcome {
        files: vec![path],
        failed_rows: failed,
    })
}

/// Standard deviation of the estimates across the ensemble, per parameter
/// value, window and method:
/// `window,T,rho,n,std,ci_low,ci_high,mean,method`.
pub fn cmd_ensemble(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    if cfg.ensemble_size < 2 {
        return Err(Error::Config("ensemble needs ensemble_size >= 2".into()));
    }
    let sys = build_system(cfg)?;
    let windows = cfg.window_functions();
    let results = run_tasks(cfg, sys.as_ref(), &windows);

    let (path, mut w) = create(&cfg.output_dir, "ensemble.csv")?;
    w.write_record([
        "window", "T", "rho", "n", "std", "ci_low", "ci_high", "mean", "method",
    ])?;
    let mut failed = 0;
    for (task, res) in &results {
        if let Err(e) = res {
            eprintln!("rho = {} seed = {}: {e}", task.param, task.seed);
            failed += 1;
        }
    }
    let n_methods = cfg.methods.len();
    for chunk in results.chunks(cfg.ensemble_size) {
        let param = chunk[0].0.param;
        for (k, win) in windows.iter().enumerate() {
            for (m, method) in cfg.methods.iter().enumerate() {
                let xs: Vec<f64> = chunk
                    .iter()
                    .filter_map(|(_, r)| r.as_ref().ok())
                    .map(|reps| reps[k * n_methods + m].derivative)
                    .collect();
                let n = xs.len();
                let std = stats::sample_std(&xs);
                let (lo, hi) = stats::std_confidence_interval(std, n, CI_LEVEL)
                    .unwrap_or((f64::NAN, f64::NAN));
                let mean = if n > 0 { stats::mean(&xs) } else { f64::NAN };
                w.write_record([
                    win.name().to_string(),
                    fmt_f64(cfg.horizon),
                    fmt_f64(param),
                    n.to_string(),
                    fmt_f64(std),
                    fmt_f64(lo),
                    fmt_f64(hi),
                    fmt_f64(mean),
                    method.label().to_string(),
                ])?;
            }
        }
    }
    finish(&path, w)?;
    Ok(Outcome {
        files: vec![path],
        failed_rows: failed,
    })
}

/// `‖v(t)‖` along one trajectory, as `envelope.csv` and `envelope.svg`.
/// Uses the first member seed and the first parameter value.
pub fn cmd_envelope(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    let values = cfg.params.values();
    if values.len() != 1 {
        return Err(Error::Config(format!(
            "envelope needs a single parameter value, got {}",
            values.len()
        )));
    }
    let param = values[0];
    let sys = build_system(cfg)?;
    let u0 = initial_condition(member_seed(cfg.seed, 0), sys.dim());
    let window = WindowFunction::new(cfg.windows[0]);

    let report = integrate_trajectory(sys.as_ref(), param, &u0, cfg.burn_in, cfg.horizon, cfg.dt)
        .and_then(|traj| {
            let sol = solve_tangent(&traj, sys.as_ref())?;
            tangent_sensitivity(&traj, sys.as_ref(), &sol, &window)
        });
    let report = match report {
        Ok(r) => r,
        Err(e) => {
            eprintln!("rho = {param}: {e}");
            return Ok(Outcome {
                files: Vec::new(),
                failed_rows: 1,
            });
        }
    };

    std::fs::create_dir_all(&cfg.output_dir).map_err(|e| Error::io(&cfg.output_dir, e))?;
    let csv_path = cfg.output_dir.join("envelope.csv");
    let file = File::create(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
    report.write_envelope_csv(BufWriter::new(file))?;

    let svg_path = cfg.output_dir.join("envelope.svg");
    LinePlot::new(
        &format!("shadowing direction, rho = {param}"),
        "t",
        "|v(t)|",
    )
    .with_series(Series::new("|v|", report.envelope.clone()))
    .write(&svg_path)?;

    if let Some(loc) = report.argmin_location {
        println!(
            "argmin |v|: t = {} ({} of T)",
            fmt_f64(loc * report.horizon),
            fmt_f64(loc)
        );
    }
    Ok(Outcome {
        files: vec![csv_path, svg_path],
        failed_rows: 0,
    })
}

/// Tabulates all windows on a uniform grid (`windows.csv`), their numeric
/// means (`window_means.csv`) and an overlay plot (`windows.svg`).
pub fn cmd_windows(out_dir: &Path) -> Result<Outcome> {
    let windows: Vec<_> = WindowKind::ALL
        .iter()
        .map(|&k| WindowFunction::new(k))
        .collect();
    let grid: Vec<f64> = (0..WINDOW_TABLE_POINTS)
        .map(|i| i as f64 / (WINDOW_TABLE_POINTS - 1) as f64)
        .collect();

    let (table, mut w) = create(out_dir, "windows.csv")?;
    let mut header = vec!["s".to_string()];
    header.extend(windows.iter().map(|w| w.name().to_string()));
    w.write_record(&header)?;
    for &s in &grid {
        let mut row = vec![fmt_f64(s)];
        row.extend(windows.iter().map(|w| fmt_f64(w.eval(s))));
        w.write_record(&row)?;
    }
    finish(&table, w)?;

    let (means, mut w) = create(out_dir, "window_means.csv")?;
    w.write_record(["window", "mean", "admissible"])?;
    for win in &windows {
        w.write_record([
            win.name().to_string(),
            fmt_f64(win.mean()),
            win.admissible().to_string(),
        ])?;
    }
    finish(&means, w)?;

    let plot = windows
        .iter()
        .fold(LinePlot::new("window functions", "s", "w(s)"), |p, win| {
            p.with_series(Series::new(
                win.name(),
                grid.iter().map(|&s| (s, win.eval(s))).collect(),
            ))
        });
    let svg = out_dir.join("windows.svg");
    plot.write(&svg)?;

    Ok(Outcome {
        files: vec![table, means, svg],
        failed_rows: 0,
    })
}
