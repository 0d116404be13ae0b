//! Tangent route: the minimum-norm solution of the linearized equation
//! without a time-dilation term, and its windowed derivative estimate.
//!
//! The continuous problem is discretized first and then optimized, so the
//! KKT conditions below hold exactly for the discrete unknowns:
//!
//! ```text
//! M v + Bᵀ λ = 0,    B v = h
//! ```
//!
//! Eliminating `v` gives `S λ = −h` with `S = B M⁻¹ Bᵀ`. The multipliers
//! `λ`, one per interval, play the role of `w` in `dw/dt = −f_uᵀ w + v`;
//! its zero boundary values are implicit since no multiplier exists outside
//! the grid.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::integrate::{trapezoid_weight, Trajectory};
use crate::lss::LssOperator;
use crate::report::{Method, SensitivityReport};
use crate::system::DynamicalSystem;
use crate::window::WindowFunction;

#[derive(Debug, Clone)]
pub struct TangentSolution {
    /// Shadowing direction at the `N + 1` grid nodes.
    pub v: Vec<DVector<f64>>,
    /// Lagrange multipliers, one per interval.
    pub w_mult: Vec<DVector<f64>>,
    /// Max-norm of the linearized-step residual, per unit time.
    pub constraint_residual: f64,
    /// Max-norm of the Lagrangian gradient, per unit time.
    pub optimality_residual: f64,
}

impl TangentSolution {
    pub fn max_norm_v(&self) -> f64 {
        self.v.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn max_norm_multiplier(&self) -> f64 {
        self.w_mult.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }
}

/// Finds the `v` of least (trapezoidal) L² norm that satisfies the
/// linearized midpoint step, the discrete form of `dv/dt = f_u v + f_s`
/// along `traj`.
pub fn solve_tangent<S: DynamicalSystem + ?Sized>(
    traj: &Trajectory,
    sys: &S,
) -> Result<TangentSolution> {
    if traj.n_steps() < 2 {
        return Err(Error::InvalidArgument(
            "tangent solve needs at least two intervals".into(),
        ));
    }
    let op = LssOperator::build(traj, sys)?;
    let rhs = op.forcing().iter().map(|h| -h).collect();
    let lambda = op.solve_schur(rhs)?;
    let v: Vec<_> = op
        .apply_mass_inv(&op.apply_bt(&lambda))
        .into_iter()
        .map(|x| -x)
        .collect();
    if v.iter().any(|x| x.iter().any(|c| !c.is_finite())) {
        return Err(Error::SolverFailure(Box::new(Error::NonFiniteState {
            step: 0,
        })));
    }
    let (constraint_residual, optimality_residual) = kkt_residuals(traj, sys, &v, &lambda);
    Ok(TangentSolution {
        v,
        w_mult: lambda,
        constraint_residual,
        optimality_residual,
    })
}

/// Re-evaluates the discrete KKT conditions directly from the trajectory,
/// using matrix-free products with the linearized midpoint step rather than
/// the assembled operator. Returns the max-norm residuals of feasibility
/// and stationarity, both per unit time.
pub fn kkt_residuals<S: DynamicalSystem + ?Sized>(
    traj: &Trajectory,
    sys: &S,
    v: &[DVector<f64>],
    lambda: &[DVector<f64>],
) -> (f64, f64) {
    let n_steps = traj.n_steps();
    let dt = traj.dt();
    let s = traj.param();

    let mut feas: f64 = 0.0;
    let mut step_t_lambda = Vec::with_capacity(n_steps);
    for (i, u) in traj.states()[..n_steps].iter().enumerate() {
        let mid = u + sys.f(u, s) * (0.5 * dt);
        let a_u = sys.f_u(u, s);
        let a_m = sys.f_u(&mid, s);
        // Φ_u v = v + dt A_m (v + (dt/2) A_u v)
        let inner = &v[i] + &a_u * &v[i] * (0.5 * dt);
        let stepped = &v[i] + &a_m * inner * dt;
        let forced = (sys.f_s(&mid, s) + &a_m * sys.f_s(u, s) * (0.5 * dt)) * dt;
        let r = (&v[i + 1] - stepped - forced) / dt;
        feas = feas.max(r.amax());
        // Φ_uᵀ λ = λ + dt (A_mᵀ λ + (dt/2) A_uᵀ A_mᵀ λ)
        let am_t = a_m.tr_mul(&lambda[i]);
        step_t_lambda.push(&lambda[i] + (a_u.tr_mul(&am_t) * (0.5 * dt) + am_t) * dt);
    }

    let mut opt: f64 = 0.0;
    for j in 0..=n_steps {
        let mut g = &v[j] * trapezoid_weight(j, n_steps);
        if j < n_steps {
            g -= &step_t_lambda[j] / dt;
        }
        if j > 0 {
            g += &lambda[j - 1] / dt;
        }
        opt = opt.max(g.amax());
    }
    (feas, opt)
}

/// Windowed trapezoidal average of `J_u·v + J_s` over the trajectory.
pub fn tangent_sensitivity<S: DynamicalSystem + ?Sized>(
    traj: &Trajectory,
    sys: &S,
    sol: &TangentSolution,
    w: &WindowFunction,
) -> Result<SensitivityReport> {
    let n_steps = traj.n_steps();
    if sol.v.len() != n_steps + 1 {
        return Err(Error::InvalidArgument(format!(
            "tangent solution has {} nodes, trajectory has {}",
            sol.v.len(),
            n_steps + 1
        )));
    }
    let s = traj.param();
    let q = w.quadrature_weights(n_steps);
    let derivative = traj
        .states()
        .iter()
        .zip(&sol.v)
        .zip(&q)
        .map(|((u, v), qi)| qi * (sys.output_u(u, s).dot(v) + sys.output_s(u, s)))
        .sum();

    let envelope: Vec<(f64, f64)> = sol
        .v
        .iter()
        .enumerate()
        .map(|(i, v)| (traj.time(i), v.norm()))
        .collect();
    let argmin = envelope
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(i, _)| i as f64 / n_steps as f64);

    Ok(SensitivityReport {
        derivative,
        method: Method::Tangent,
        window_name: w.name().to_string(),
        horizon: traj.horizon(),
        dt: traj.dt(),
        argmin_location: argmin,
        envelope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::integrate_trajectory;
    use crate::system::{linear_test_system, Lorenz63};
    use crate::window::{make_window, WindowKind};
    use nalgebra::DMatrix;

    /// Lorenz dynamics with the parameter forcing switched off.
    struct Unforced(Lorenz63);

    impl DynamicalSystem for Unforced {
        fn dim(&self) -> usize {
            3
        }
        fn f(&self, u: &DVector<f64>, s: f64) -> DVector<f64> {
            self.0.f(u, s)
        }
        fn f_u(&self, u: &DVector<f64>, s: f64) -> DMatrix<f64> {
            self.0.f_u(u, s)
        }
        fn f_s(&self, _u: &DVector<f64>, _s: f64) -> DVector<f64> {
            DVector::zeros(3)
        }
        fn output(&self, u: &DVector<f64>, s: f64) -> f64 {
            self.0.output(u, s)
        }
        fn output_u(&self, u: &DVector<f64>, s: f64) -> DVector<f64> {
            self.0.output_u(u, s)
        }
        fn output_s(&self, u: &DVector<f64>, s: f64) -> f64 {
            self.0.output_s(u, s)
        }
    }

    fn lorenz_traj(horizon: f64) -> Trajectory {
        let u0 = DVector::from_row_slice(&[-4.0, 3.0, 22.0]);
        integrate_trajectory(&Lorenz63::new(), 28.0, &u0, 10.0, horizon, 0.02).unwrap()
    }

    #[test]
    fn linear_fixture_interior_is_one() {
        let sys = linear_test_system(1.0).unwrap();
        let traj =
            integrate_trajectory(&sys, 2.0, &DVector::from_element(1, -1.0), 5.0, 50.0, 0.02)
                .unwrap();
        let sol = solve_tangent(&traj, &sys).unwrap();
        let n = traj.n_steps();
        // The homogeneous mode e^{−t} leaves a boundary layer near t = 0.
        for v in &sol.v[n / 5..] {
            assert!((v[0] - 1.0).abs() < 1e-3, "{}", v[0]);
        }
        let rep = tangent_sensitivity(&traj, &sys, &sol, &make_window("sine2").unwrap()).unwrap();
        assert!((rep.derivative - 1.0).abs() < 1e-3, "{}", rep.derivative);
    }

    #[test]
    fn zero_forcing_gives_zero_direction() {
        let traj = lorenz_traj(5.0);
        let sol = solve_tangent(&traj, &Unforced(Lorenz63::new())).unwrap();
        assert!(sol.max_norm_v() == 0.0);
        assert!(sol.max_norm_multiplier() == 0.0);
    }

    #[test]
    fn lorenz_kkt_residuals_are_small() {
        let traj = lorenz_traj(20.0);
        let sol = solve_tangent(&traj, &Lorenz63::new()).unwrap();
        let scale_v = 1.0 + sol.max_norm_v();
        let scale_l = 1.0 + sol.max_norm_v() + sol.max_norm_multiplier();
        assert!(
            sol.constraint_residual <= 1e-9 * scale_v,
            "{}",
            sol.constraint_residual
        );
        assert!(
            sol.optimality_residual <= 1e-8 * scale_l,
            "{}",
            sol.optimality_residual
        );
    }

    #[test]
    fn envelope_and_argmin_are_consistent() {
        let traj = lorenz_traj(10.0);
        let sys = Lorenz63::new();
        let sol = solve_tangent(&traj, &sys).unwrap();
        let rep = tangent_sensitivity(&traj, &sys, &sol, &WindowFunction::new(WindowKind::Sine4))
            .unwrap();
        assert_eq!(rep.envelope.len(), traj.n_steps() + 1);
        let loc = rep.argmin_location.unwrap();
        assert!((0.0..=1.0).contains(&loc));
        let i = (loc * traj.n_steps() as f64).round() as usize;
        let min = rep
            .envelope
            .iter()
            .map(|e| e.1)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(rep.envelope[i].1, min);
        assert!(rep.derivative.is_finite());
    }

    #[test]
    fn rejects_too_short_trajectory() {
        let sys = linear_test_system(1.0).unwrap();
        let traj =
            integrate_trajectory(&sys, 0.0, &DVector::from_element(1, 1.0), 0.0, 0.1, 0.1).unwrap();
        assert!(solve_tangent(&traj, &sys).is_err());
    }

    #[test]
    fn rejects_mismatched_dimensions() {
        let sys = linear_test_system(1.0).unwrap();
        let traj = lorenz_traj(1.0);
        assert!(solve_tangent(&traj, &sys).is_err());
    }
}
