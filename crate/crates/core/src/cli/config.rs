//! Experiment configuration: flat `key = value` files overridden by flags.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::integrate::grid_steps;
use crate::report::Method;
use crate::system::{linear_test_system, LorenzParams};
use crate::window::{WindowFunction, WindowKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    Lorenz,
    Linear,
}

impl SystemKind {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "lorenz" => Ok(SystemKind::Lorenz),
            "linear" => Ok(SystemKind::Linear),
            other => Err(Error::Config(format!(
                "unknown system `{other}` (expected lorenz or linear)"
            ))),
        }
    }
}

/// Parameter values to visit: a single value, a comma list, or an inclusive
/// `start:stop:step` range.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamSweep {
    List(Vec<f64>),
    Range { start: f64, stop: f64, step: f64 },
}

impl ParamSweep {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.contains(':') {
            let parts: Vec<_> = s.split(':').map(str::trim).collect();
            let [start, stop, step] = parts[..] else {
                return Err(Error::Config(format!(
                    "parameter range `{s}` must be start:stop:step"
                )));
            };
            return Ok(ParamSweep::Range {
                start: parse_f64("rho", start)?,
                stop: parse_f64("rho", stop)?,
                step: parse_f64("rho", step)?,
            });
        }
        let values = s
            .split(',')
            .map(|v| parse_f64("rho", v.trim()))
            .collect::<Result<Vec<_>>>()?;
        Ok(ParamSweep::List(values))
    }

    /// Expands the sweep. Ranges include `stop` when it falls on the grid.
    pub fn values(&self) -> Vec<f64> {
        match *self {
            ParamSweep::List(ref v) => v.clone(),
            ParamSweep::Range { start, stop, step } => {
                if step.is_nan() || step <= 0.0 || stop < start {
                    return Vec::new();
                }
                let n = ((stop - start) / step + 1e-9).floor() as usize;
                (0..=n).map(|k| start + k as f64 * step).collect()
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub system: SystemKind,
    pub params: ParamSweep,
    /// Rate of the linear relaxation system.
    pub linear_rate: f64,
    pub horizon: f64,
    pub dt: f64,
    pub burn_in: f64,
    pub windows: Vec<WindowKind>,
    pub methods: Vec<Method>,
    pub ensemble_size: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
    /// Worker threads; `None` uses every available core.
    pub jobs: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            system: SystemKind::Lorenz,
            params: ParamSweep::List(vec![LorenzParams::default().rho]),
            linear_rate: 1.0,
            horizon: 50.0,
            dt: 0.02,
            burn_in: 10.0,
            windows: WindowKind::ALL.to_vec(),
            methods: vec![Method::Tangent],
            ensemble_size: 100,
            seed: 0,
            output_dir: PathBuf::from("out"),
            jobs: None,
        }
    }
}

impl ExperimentConfig {
    /// Applies one `key = value` setting. Flags and files share this path.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "system" => self.system = SystemKind::parse(value)?,
            "rho" | "param" | "params" => self.params = ParamSweep::parse(value)?,
            "a" | "rate" => self.linear_rate = parse_f64(key, value)?,
            "T" | "horizon" => self.horizon = parse_f64(key, value)?,
            "dt" => self.dt = parse_f64(key, value)?,
            "burn_in" => self.burn_in = parse_f64(key, value)?,
            "window" | "windows" => self.windows = parse_windows(value)?,
            "method" => self.methods = parse_methods(value)?,
            "ensemble_size" => {
                self.ensemble_size = value
                    .parse()
                    .map_err(|_| Error::Config(format!("ensemble_size: bad integer `{value}`")))?
            }
            "seed" => {
                self.seed = value
                    .parse()
                    .map_err(|_| Error::Config(format!("seed: bad integer `{value}`")))?
            }
            "out" | "output_dir" => self.output_dir = PathBuf::from(value),
            "jobs" => {
                let j: usize = value
                    .parse()
                    .map_err(|_| Error::Config(format!("jobs: bad integer `{value}`")))?;
                self.jobs = (j > 0).then_some(j);
            }
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
            cfg.set(k, v)
                .map_err(|e| Error::Config(format!("line {}: {}", n + 1, strip(&e))))?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse_str(&text)
    }

    /// Checks the invariants every command relies on.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return bad(format!("T must be positive, got {}", self.horizon));
        }
        if !(self.burn_in.is_finite() && self.burn_in >= 0.0) {
            return bad(format!(
                "burn_in must be non-negative, got {}",
                self.burn_in
            ));
        }
        grid_steps(self.horizon, self.dt).map_err(|e| Error::Config(e.to_string()))?;
        let values = self.params.values();
        if values.is_empty() {
            return bad("parameter sweep is empty".into());
        }
        if values.iter().any(|v| !v.is_finite()) {
            return bad("parameter values must be finite".into());
        }
        if self.windows.is_empty() {
            return bad("no window selected".into());
        }
        if self.ensemble_size == 0 {
            return bad("ensemble_size must be at least 1".into());
        }
        match self.system {
            SystemKind::Linear => {
                linear_test_system(self.linear_rate).map_err(|e| Error::Config(e.to_string()))?;
            }
            SystemKind::Lorenz => {
                for &rho in &values {
                    LorenzParams::with_rho(rho)
                        .validate()
                        .map_err(|e| Error::Config(e.to_string()))?;
                }
            }
        }
        Ok(())
    }

    pub fn window_functions(&self) -> Vec<WindowFunction> {
        self.windows
            .iter()
            .map(|&k| WindowFunction::new(k))
            .collect()
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.parse()
        .map_err(|_| Error::Config(format!("{}: bad number `{v}`", key.trim())))
}

fn parse_windows(v: &str) -> Result<Vec<WindowKind>> {
    if v == "all" {
        return Ok(WindowKind::ALL.to_vec());
    }
    let mut out: Vec<WindowKind> = Vec::new();
    for label in v.split(',').map(str::trim) {
        let k: WindowKind = label
            .parse()
            .map_err(|e: Error| Error::Config(e.to_string()))?;
        if !out.contains(&k) {
            out.push(k);
        }
    }
    Ok(out)
}

fn parse_methods(v: &str) -> Result<Vec<Method>> {
    match v {
        "both" => Ok(vec![Method::Tangent, Method::Adjoint]),
        other => Ok(vec![other.parse()?]),
    }
}

fn strip(e: &Error) -> String {
    match e {
        Error::Config(m) => m.clone(),
        other => other.to_string(),
    }
}
