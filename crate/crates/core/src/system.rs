//! Parameterized ODE systems `du/dt = f(u, s)` with a scalar output `J(u, s)`.
//!
//! Every system supplies hand-coded Jacobians. Finite differences appear only
//! in tests, as oracles.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A one-parameter family of ODEs together with the output being averaged.
///
/// Implementations must be pure: the same inputs always give the same
/// outputs, so systems can be shared freely across worker threads.
pub trait DynamicalSystem: Send + Sync {
    /// State dimension `n`.
    fn dim(&self) -> usize;

    /// Parameter dimension. Only scalar parameters are supported.
    fn param_dim(&self) -> usize {
        1
    }

    /// Right-hand side `f(u, s)`.
    fn f(&self, u: &DVector<f64>, s: f64) -> DVector<f64>;

    /// `∂f/∂u`, an `n × n` matrix.
    fn f_u(&self, u: &DVector<f64>, s: f64) -> DMatrix<f64>;

    /// `∂f/∂s`.
    fn f_s(&self, u: &DVector<f64>, s: f64) -> DVector<f64>;

    /// Instantaneous output `J(u, s)`.
    fn output(&self, u: &DVector<f64>, s: f64) -> f64;

    /// `∂J/∂u`.
    fn output_u(&self, u: &DVector<f64>, s: f64) -> DVector<f64>;

    /// `∂J/∂s`.
    fn output_s(&self, u: &DVector<f64>, s: f64) -> f64;
}

impl<T: DynamicalSystem + ?Sized> DynamicalSystem for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn param_dim(&self) -> usize {
        (**self).param_dim()
    }
    fn f(&self, u: &DVector<f64>, s: f64) -> DVector<f64> {
        (**self).f(u, s)
    }
    fn f_u(&self, u: &DVector<f64>, s: f64) -> DMatrix<f64> {
        (**self).f_u(u, s)
    }
    fn f_s(&self, u: &DVector<f64>, s: f64) -> DVector<f64> {
        (**self).f_s(u, s)
    }
    fn output(&self, u: &DVector<f64>, s: f64) -> f64 {
        (**self).output(u, s)
    }
    fn output_u(&self, u: &DVector<f64>, s: f64) -> DVector<f64> {
        (**self).output_u(u, s)
    }
    fn output_s(&self, u: &DVector<f64>, s: f64) -> f64 {
        (**self).output_s(u, s)
    }
}

/// Lorenz-63 coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorenzParams {
    pub sigma: f64,
    pub beta: f64,
    pub rho: f64,
}

impl Default for LorenzParams {
    fn default() -> Self {
        Self {
            sigma: 10.0,
            beta: 8.0 / 3.0,
            rho: 28.0,
        }
    }
}

impl LorenzParams {
    pub fn with_rho(rho: f64) -> Self {
        Self {
            rho,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if ok(self.sigma) && ok(self.beta) && ok(self.rho) {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "Lorenz parameters must be positive, got {self:?}"
            )))
        }
    }
}

pub fn lorenz_f([x, y, z]: [f64; 3], p: &LorenzParams) -> [f64; 3] {
    [p.sigma * (y - x), x * (p.rho - z) - y, x * y - p.beta * z]
}

pub fn lorenz_fu([x, y, z]: [f64; 3], p: &LorenzParams) -> [[f64; 3]; 3] {
    [
        [-p.sigma, p.sigma, 0.0],
        [p.rho - z, -1.0, -x],
        [y, x, -p.beta],
    ]
}

/// `∂f/∂ρ`.
pub fn lorenz_fs([x, _, _]: [f64; 3], _p: &LorenzParams) -> [f64; 3] {
    [0.0, x, 0.0]
}

/// The averaged quantity, `z`.
pub fn lorenz_output([_, _, z]: [f64; 3], _p: &LorenzParams) -> f64 {
    z
}

/// Which Lorenz coefficient plays the role of the sensitivity parameter `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LorenzParameter {
    Sigma,
    Beta,
    #[default]
    Rho,
}

/// Lorenz-63 as a [`DynamicalSystem`] with output `J = z`.
///
/// The coefficient selected by `wrt` is replaced by `s` on every evaluation;
/// the other two are taken from `params`.
#[derive(Debug, Clone, Copy)]
pub struct Lorenz63 {
    pub params: LorenzParams,
    pub wrt: LorenzParameter,
}

impl Lorenz63 {
    /// Standard σ = 10, β = 8/3 system, differentiated with respect to ρ.
    pub fn new() -> Self {
        Self {
            params: LorenzParams::default(),
            wrt: LorenzParameter::Rho,
        }
    }

    pub fn with_parameter(params: LorenzParams, wrt: LorenzParameter) -> Result<Self> {
        params.validate()?;
        Ok(Self { params, wrt })
    }

    fn at(&self, s: f64) -> LorenzParams {
        let mut p = self.params;
        match self.wrt {
            LorenzParameter::Sigma => p.sigma = s,
            LorenzParameter::Beta => p.beta = s,
            LorenzParameter::Rho => p.rho = s,
        }
        p
    }
}

impl Default for Lorenz63 {
    fn default() -> Self {
        Self::new()
    }
}

fn xyz(u: &DVector<f64>) -> [f64; 3] {
    [u[0], u[1], u[2]]
}

impl DynamicalSystem for Lorenz63 {
    fn dim(&self) -> usize {
        3
    }

    fn f(&self, u: &DVector<f64>, s: f64) -> DVector<f64> {
        DVector::from_row_slice(&lorenz_f(xyz(u), &self.at(s)))
    }

    fn f_u(&self, u: &DVector<f64>, s: f64) -> DMatrix<f64> {
        let j = lorenz_fu(xyz(u), &self.at(s));
        DMatrix::from_fn(3, 3, |r, c| j[r][c])
    }

    fn f_s(&self, u: &DVector<f64>, s: f64) -> DVector<f64> {
        let p = self.at(s);
        let [x, y, z] = xyz(u);
        let d = match self.wrt {
            LorenzParameter::Rho => lorenz_fs([x, y, z], &p),
            LorenzParameter::Sigma => [y - x, 0.0, 0.0],
            LorenzParameter::Beta => [0.0, 0.0, -z],
        };
        DVector::from_row_slice(&d)
    }

    fn output(&self, u: &DVector<f64>, s: f64) -> f64 {
        lorenz_output(xyz(u), &self.at(s))
    }

    fn output_u(&self, _u: &DVector<f64>, _s: f64) -> DVector<f64> {
        DVector::from_row_slice(&[0.0, 0.0, 1.0])
    }

    fn output_s(&self, _u: &DVector<f64>, _s: f64) -> f64 {
        0.0
    }
}

/// Scalar relaxation `du/dt = a(s − u)` with `J = u`.
///
/// Every trajectory relaxes to `u = s`, so `⟨J⟩ = s` and `d⟨J⟩/ds = 1`
/// exactly. Used to validate the whole pipeline against a known answer.
#[derive(Debug, Clone, Copy)]
pub struct LinearRelaxation {
    a: f64,
}

impl LinearRelaxation {
    pub fn rate(&self) -> f64 {
        self.a
    }
}

pub fn linear_test_system(a: f64) -> Result<LinearRelaxation> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "relaxation rate must be positive, got {a}"
        )));
    }
    Ok(LinearRelaxation { a })
}

impl DynamicalSystem for LinearRelaxation {
    fn dim(&self) -> usize {
        1
    }

    fn f(&self, u: &DVector<f64>, s: f64) -> DVector<f64> {
        DVector::from_element(1, self.a * (s - u[0]))
    }

    fn f_u(&self, _u: &DVector<f64>, _s: f64) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, -self.a)
    }

    fn f_s(&self, _u: &DVector<f64>, _s: f64) -> DVector<f64> {
        DVector::from_element(1, self.a)
    }

    fn output(&self, u: &DVector<f64>, _s: f64) -> f64 {
        u[0]
    }

    fn output_u(&self, _u: &DVector<f64>, _s: f64) -> DVector<f64> {
        DVector::from_element(1, 1.0)
    }

    fn output_s(&self, _u: &DVector<f64>, _s: f64) -> f64 {
        0.0
    }
}
