//! Window functions on `[0, 1]` and windowed time averages.
//!
//! A window is admissible for the sensitivity estimate when it is C¹,
//! vanishes at both ends and has unit mean. All built-in windows are
//! normalized to unit mean; `square` is kept as the unwindowed reference and
//! is flagged inadmissible.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::integrate::trapezoid_weight;
use crate::quadrature;

/// The built-in window shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WindowKind {
    Square,
    Sine,
    Sine2,
    Sine4,
    Bump,
}

impl WindowKind {
    pub const ALL: [WindowKind; 5] = [
        WindowKind::Square,
        WindowKind::Sine,
        WindowKind::Sine2,
        WindowKind::Sine4,
        WindowKind::Bump,
    ];

    pub fn label(self) -> &'static str {
        match self {
            WindowKind::Square => "square",
            WindowKind::Sine => "sine",
            WindowKind::Sine2 => "sine2",
            WindowKind::Sine4 => "sine4",
            WindowKind::Bump => "bump",
        }
    }

    pub fn is_admissible(self) -> bool {
        self != WindowKind::Square
    }
}

impl fmt::Display for WindowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.label())
    }
}

impl FromStr for WindowKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        WindowKind::ALL
            .into_iter()
            .find(|k| k.label() == s.trim())
            .ok_or_else(|| Error::UnknownWindow(s.to_string()))
    }
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Shape {
    Builtin(WindowKind),
    Custom { eval: ScalarFn, deriv: ScalarFn },
}

/// A normalized window `w: [0, 1] → R`.
#[derive(Clone)]
pub struct WindowFunction {
    name: String,
    shape: Shape,
    mean: f64,
    admissible: bool,
}

impl fmt::Debug for WindowFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WindowFunction")
            .field("name", &self.name)
            .field("mean", &self.mean)
            .field("admissible", &self.admissible)
            .finish()
    }
}

// Unnormalized bump and its derivative; both taken as 0 at the endpoints.
fn bump_raw(s: f64) -> f64 {
    let g = s - s * s;
    if g <= 0.0 {
        return 0.0;
    }
    let e = -1.0 / g;
    if e < -700.0 {
        0.0
    } else {
        e.exp()
    }
}

fn bump_raw_deriv(s: f64) -> f64 {
    let g = s - s * s;
    if g <= 0.0 {
        return 0.0;
    }
    let e = -1.0 / g;
    if e < -700.0 {
        0.0
    } else {
        e.exp() * (1.0 - 2.0 * s) / (g * g)
    }
}

/// `Z = ∫₀¹ exp(−1/(t − t²)) dt`.
pub fn bump_normalization() -> f64 {
    static Z: OnceLock<f64> = OnceLock::new();
    *Z.get_or_init(|| quadrature::integrate(bump_raw, 0.0, 1.0, 1e-12))
}

fn builtin_eval(kind: WindowKind, s: f64) -> f64 {
    match kind {
        WindowKind::Square => 1.0,
        WindowKind::Sine => 0.5 * PI * (PI * s).sin(),
        WindowKind::Sine2 => 1.0 - (2.0 * PI * s).cos(),
        WindowKind::Sine4 => (8.0 / 3.0) * (PI * s).sin().powi(4),
        WindowKind::Bump => bump_raw(s) / bump_normalization(),
    }
}

fn builtin_deriv(kind: WindowKind, s: f64) -> f64 {
    match kind {
        WindowKind::Square => 0.0,
        WindowKind::Sine => 0.5 * PI * PI * (PI * s).cos(),
        WindowKind::Sine2 => 2.0 * PI * (2.0 * PI * s).sin(),
        WindowKind::Sine4 => {
            let (sn, cs) = (PI * s).sin_cos();
            (32.0 / 3.0) * PI * sn.powi(3) * cs
        }
        WindowKind::Bump => bump_raw_deriv(s) / bump_normalization(),
    }
}

impl WindowFunction {
    pub fn new(kind: WindowKind) -> Self {
        let mean = quadrature::integrate(|s| builtin_eval(kind, s), 0.0, 1.0, 1e-13);
        Self {
            name: kind.label().to_string(),
            shape: Shape::Builtin(kind),
            mean,
            admissible: kind.is_admissible(),
        }
    }

    /// A user-defined window. It is not rescaled; admissibility is decided
    /// numerically from the endpoint values and the computed mean.
    pub fn custom<F, D>(name: impl Into<String>, eval: F, deriv: D) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let mean = quadrature::integrate(&eval, 0.0, 1.0, 1e-13);
        let admissible =
            eval(0.0).abs() <= 1e-12 && eval(1.0).abs() <= 1e-12 && (mean - 1.0).abs() <= 1e-10;
        Self {
            name: name.into(),
            shape: Shape::Custom {
                eval: Arc::new(eval),
                deriv: Arc::new(deriv),
            },
            mean,
            admissible,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> Option<WindowKind> {
        match self.shape {
            Shape::Builtin(k) => Some(k),
            Shape::Custom { .. } => None,
        }
    }

    /// `∫₀¹ w(s) ds`, computed by quadrature.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn admissible(&self) -> bool {
        self.admissible
    }

    pub fn eval(&self, s: f64) -> f64 {
        match &self.shape {
            Shape::Builtin(k) => builtin_eval(*k, s),
            Shape::Custom { eval, .. } => eval(s),
        }
    }

    pub fn eval_deriv(&self, s: f64) -> f64 {
        match &self.shape {
            Shape::Builtin(k) => builtin_deriv(*k, s),
            Shape::Custom { deriv, .. } => deriv(s),
        }
    }

    /// Quadrature weights `q_i` such that `Σ q_i x_i` is the trapezoidal
    /// estimate of `(1/T) ∫₀ᵀ w(t/T) x(t) dt` on an `n_steps`-interval grid.
    pub fn quadrature_weights(&self, n_steps: usize) -> Vec<f64> {
        let n = n_steps as f64;
        (0..=n_steps)
            .map(|i| trapezoid_weight(i, n_steps) * self.eval(i as f64 / n) / n)
            .collect()
    }
}

pub fn make_window(name: &str) -> Result<WindowFunction> {
    Ok(WindowFunction::new(name.parse()?))
}

/// Trapezoidal `(1/T) ∫₀ᵀ w(t/T) x(t) dt` for a signal sampled every `dt`.
pub fn windowed_average(signal: &[f64], dt: f64, w: &WindowFunction) -> Result<f64> {
    if signal.len() < 2 {
        return Err(Error::InvalidArgument(
            "windowed average needs at least two samples".into(),
        ));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "dt must be positive, got {dt}"
        )));
    }
    let q = w.quadrature_weights(signal.len() - 1);
    Ok(q.iter().zip(signal).map(|(a, b)| a * b).sum())
}
