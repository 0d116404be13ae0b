//! Seeded initial conditions and parallel ensembles of derivative estimates.
//!
//! Member `k` of an ensemble with base seed `seed` uses the seed
//! `seed + k`, so any single member can be reproduced on its own. Results
//! are always returned in member order, independent of scheduling.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::adjoint::{adjoint_sensitivity, solve_adjoint};
use crate::error::Result;
use crate::integrate::{integrate_trajectory, Trajectory};
use crate::report::{Method, SensitivityReport};
use crate::stats;
use crate::system::DynamicalSystem;
use crate::tangent::{solve_tangent, tangent_sensitivity};
use crate::window::WindowFunction;

/// Half-width of the box `[−L, L]ⁿ` initial conditions are drawn from.
pub const INITIAL_BOX: f64 = 10.0;

/// Uniform draw from `[−10, 10]^dim`.
pub fn initial_condition(seed: u64, dim: usize) -> DVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DVector::from_fn(dim, |_, _| rng.random_range(-INITIAL_BOX..=INITIAL_BOX))
}

pub fn member_seed(base: u64, member: usize) -> u64 {
    base.wrapping_add(member as u64)
}

pub fn initial_conditions(base: u64, count: usize, dim: usize) -> Vec<DVector<f64>> {
    (0..count)
        .map(|k| initial_condition(member_seed(base, k), dim))
        .collect()
}

#[derive(Debug, Clone, Copy)]
pub struct RunSettings {
    pub burn_in: f64,
    pub horizon: f64,
    pub dt: f64,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            burn_in: 10.0,
            horizon: 50.0,
            dt: 0.02,
        }
    }
}

/// Derivative estimates on an existing trajectory for every window and
/// method, ordered window-major. The tangent problem is solved once and
/// reused across windows; the adjoint is solved once per window.
pub fn estimate_on<S: DynamicalSystem + ?Sized>(
    traj: &Trajectory,
    sys: &S,
    windows: &[WindowFunction],
    methods: &[Method],
) -> Result<Vec<SensitivityReport>> {
    let tangent = if methods.contains(&Method::Tangent) {
        Some(solve_tangent(traj, sys)?)
    } else {
        None
    };
    let mut out = Vec::with_capacity(windows.len() * methods.len());
    for w in windows {
        for m in methods {
            let rep = match (m, &tangent) {
                (Method::Tangent, Some(sol)) => tangent_sensitivity(traj, sys, sol, w)?,
                (Method::Tangent, None) => unreachable!("tangent solution computed above"),
                (Method::Adjoint, _) => {
                    adjoint_sensitivity(traj, sys, &solve_adjoint(traj, sys, w)?)?
                }
            };
            out.push(rep);
        }
    }
    Ok(out)
}

/// Integrates one trajectory from `u0` and runs [`estimate_on`].
pub fn estimate<S: DynamicalSystem + ?Sized>(
    sys: &S,
    s: f64,
    u0: &DVector<f64>,
    settings: &RunSettings,
    windows: &[WindowFunction],
    methods: &[Method],
) -> Result<Vec<SensitivityReport>> {
    let traj = integrate_trajectory(sys, s, u0, settings.burn_in, settings.horizon, settings.dt)?;
    estimate_on(&traj, sys, windows, methods)
}

/// Runs [`estimate`] for each initial condition on the current rayon pool.
pub fn run_ensemble<S: DynamicalSystem + ?Sized>(
    sys: &S,
    s: f64,
    initial: &[DVector<f64>],
    settings: &RunSettings,
    windows: &[WindowFunction],
    methods: &[Method],
) -> Vec<Result<Vec<SensitivityReport>>> {
    initial
        .par_iter()
        .map(|u0| estimate(sys, s, u0, settings, windows, methods))
        .collect()
}

/// Spread of one window's derivative estimates across an ensemble.
#[derive(Debug, Clone)]
pub struct WindowStats {
    pub window: String,
    pub n: usize,
    pub mean: f64,
    pub std: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Per-window statistics over the successful members of an ensemble run
/// with a single method. Failed members are skipped.
pub fn summarize(
    windows: &[WindowFunction],
    results: &[Result<Vec<SensitivityReport>>],
    level: f64,
) -> Vec<WindowStats> {
    windows
        .iter()
        .enumerate()
        .map(|(k, w)| {
            let xs: Vec<f64> = results
                .iter()
                .filter_map(|r| r.as_ref().ok())
                .map(|reps| reps[k].derivative)
                .collect();
            let n = xs.len();
            let std = stats::sample_std(&xs);
            let (ci_low, ci_high) =
                stats::std_confidence_interval(std, n, level).unwrap_or((f64::NAN, f64::NAN));
            WindowStats {
                window: w.name().to_string(),
                n,
                mean: if n > 0 { stats::mean(&xs) } else { f64::NAN },
                std,
                ci_low,
                ci_high,
            }
        })
        .collect()
}
