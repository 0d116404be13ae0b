//! Adjoint route, built as the exact transpose of the discrete tangent
//! pipeline.
//!
//! The tangent KKT matrix `K = [[M, Bᵀ], [B, 0]]` is symmetric, and the
//! tangent estimate is `gᵀv + Σ q_i J_s(u_i)` with `g_i = q_i J_u(u_i)`.
//! Solving `K [a; b] = [g; 0]` instead gives `gᵀv = bᵀh`, so the derivative
//! only needs the parameter forcing `h` contracted against `b`:
//!
//! ```text
//! S b = B M⁻¹ g,    a = M⁻¹ (g − Bᵀ b)
//! ```
//!
//! Here `h_i` is the parameter derivative of one midpoint step. In
//! continuous form `v̂ = −T b` satisfies
//! `dv̂/dt = −f_uᵀ v̂ + ŵ + w(t/T) J_u` with `v̂(0) = v̂(T) = 0`, and
//! `ŵ = −T a` satisfies `dŵ/dt = f_u ŵ` (since `B a = 0`).

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::integrate::Trajectory;
use crate::lss::LssOperator;
use crate::report::{Method, SensitivityReport};
use crate::system::DynamicalSystem;
use crate::window::WindowFunction;

#[derive(Debug, Clone)]
pub struct AdjointSolution {
    /// `v̂` at the interval midpoints; this is what the derivative uses.
    pub interval_duals: Vec<DVector<f64>>,
    /// `v̂` interpolated to the `N + 1` nodes, exactly zero at both ends.
    pub v_hat: Vec<DVector<f64>>,
    /// `ŵ` at the `N + 1` nodes.
    pub w_hat: Vec<DVector<f64>>,
    window: WindowFunction,
    forcing: Vec<DVector<f64>>,
}

impl AdjointSolution {
    pub fn window(&self) -> &WindowFunction {
        &self.window
    }
}

pub fn solve_adjoint<S: DynamicalSystem + ?Sized>(
    traj: &Trajectory,
    sys: &S,
    w: &WindowFunction,
) -> Result<AdjointSolution> {
    let n_steps = traj.n_steps();
    if n_steps < 2 {
        return Err(Error::InvalidArgument(
            "adjoint solve needs at least two intervals".into(),
        ));
    }
    let op = LssOperator::build(traj, sys)?;
    let s = traj.param();
    let q = w.quadrature_weights(n_steps);
    let g: Vec<DVector<f64>> = traj
        .states()
        .iter()
        .zip(&q)
        .map(|(u, qi)| sys.output_u(u, s) * *qi)
        .collect();

    let b = op.solve_schur(op.apply_b(&op.apply_mass_inv(&g)))?;
    let bt_b = op.apply_bt(&b);
    let resid: Vec<_> = g.iter().zip(&bt_b).map(|(gi, bi)| gi - bi).collect();
    let a = op.apply_mass_inv(&resid);

    let horizon = traj.horizon();
    let interval_duals: Vec<DVector<f64>> = b.iter().map(|x| x * -horizon).collect();
    let dim = traj.dim();
    let v_hat = (0..=n_steps)
        .map(|i| {
            if i == 0 || i == n_steps {
                DVector::zeros(dim)
            } else {
                (&interval_duals[i - 1] + &interval_duals[i]) * 0.5
            }
        })
        .collect();
    let w_hat = a.iter().map(|x| x * -horizon).collect();

    Ok(AdjointSolution {
        interval_duals,
        v_hat,
        w_hat,
        window: w.clone(),
        forcing: op.forcing().to_vec(),
    })
}

/// Contracts the adjoint field with the parameter forcing and adds the
/// direct `J_s` contribution.
pub fn adjoint_sensitivity<S: DynamicalSystem + ?Sized>(
    traj: &Trajectory,
    sys: &S,
    sol: &AdjointSolution,
) -> Result<SensitivityReport> {
    let n_steps = traj.n_steps();
    if sol.interval_duals.len() != n_steps {
        return Err(Error::InvalidArgument(format!(
            "adjoint solution has {} intervals, trajectory has {n_steps}",
            sol.interval_duals.len()
        )));
    }
    let s = traj.param();
    let dt = traj.dt();
    let horizon = traj.horizon();
    // −(1/T) Σ v̂_{i+½}·h_i, with h_i the per-step parameter forcing
    let forced: f64 = sol
        .interval_duals
        .iter()
        .zip(&sol.forcing)
        .map(|(vh, h)| vh.dot(h))
        .sum::<f64>()
        / -horizon;
    let q = sol.window.quadrature_weights(n_steps);
    let direct: f64 = traj
        .states()
        .iter()
        .zip(&q)
        .map(|(u, qi)| qi * sys.output_s(u, s))
        .sum();

    Ok(SensitivityReport {
        derivative: forced + direct,
        method: Method::Adjoint,
        window_name: sol.window.name().to_string(),
        horizon,
        dt,
        argmin_location: None,
        envelope: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::integrate_trajectory;
    use crate::system::{linear_test_system, Lorenz63};
    use crate::tangent::{solve_tangent, tangent_sensitivity};
    use crate::window::make_window;

    fn lorenz_traj(horizon: f64) -> Trajectory {
        let u0 = DVector::from_row_slice(&[2.0, -6.0, 30.0]);
        integrate_trajectory(&Lorenz63::new(), 28.0, &u0, 10.0, horizon, 0.02).unwrap()
    }

    #[test]
    fn zero_window_gives_zero_fields() {
        let traj = lorenz_traj(5.0);
        let zero = WindowFunction::custom("zero", |_| 0.0, |_| 0.0);
        let sol = solve_adjoint(&traj, &Lorenz63::new(), &zero).unwrap();
        assert!(sol.interval_duals.iter().all(|x| x.norm() == 0.0));
        assert!(sol.w_hat.iter().all(|x| x.norm() == 0.0));
        let rep = adjoint_sensitivity(&traj, &Lorenz63::new(), &sol).unwrap();
        assert_eq!(rep.derivative, 0.0);
    }

    #[test]
    fn boundary_values_are_zero() {
        let traj = lorenz_traj(5.0);
        let sol = solve_adjoint(&traj, &Lorenz63::new(), &make_window("sine").unwrap()).unwrap();
        assert_eq!(sol.v_hat[0].norm(), 0.0);
        assert_eq!(sol.v_hat.last().unwrap().norm(), 0.0);
        assert_eq!(sol.v_hat.len(), traj.n_steps() + 1);
        assert!(sol.interval_duals.iter().any(|x| x.norm() > 0.0));
    }

    #[test]
    fn linear_fixture_matches_tangent() {
        let sys = linear_test_system(1.0).unwrap();
        let traj = integrate_trajectory(&sys, 0.5, &DVector::from_element(1, 4.0), 5.0, 50.0, 0.02)
            .unwrap();
        let w = make_window("sine2").unwrap();
        let adj =
            adjoint_sensitivity(&traj, &sys, &solve_adjoint(&traj, &sys, &w).unwrap()).unwrap();
        let tan =
            tangent_sensitivity(&traj, &sys, &solve_tangent(&traj, &sys).unwrap(), &w).unwrap();
        assert!((adj.derivative - 1.0).abs() < 1e-3, "{}", adj.derivative);
        assert!((adj.derivative - tan.derivative).abs() < 1e-12);
        assert_eq!(adj.method, Method::Adjoint);
        assert!(adj.argmin_location.is_none());
    }

    #[test]
    fn lorenz_duality() {
        let traj = lorenz_traj(50.0);
        let sys = Lorenz63::new();
        let w = make_window("sine2").unwrap();
        let tan =
            tangent_sensitivity(&traj, &sys, &solve_tangent(&traj, &sys).unwrap(), &w).unwrap();
        let adj =
            adjoint_sensitivity(&traj, &sys, &solve_adjoint(&traj, &sys, &w).unwrap()).unwrap();
        let rel = (tan.derivative - adj.derivative).abs() / (1.0 + tan.derivative.abs());
        assert!(
            rel <= 1e-8,
            "tangent {} adjoint {}",
            tan.derivative,
            adj.derivative
        );
    }
}
