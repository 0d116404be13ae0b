//! Trajectory generation with the explicit midpoint rule.

use std::io::{Read, Write};

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::system::DynamicalSystem;

const GRID_TOL: f64 = 1e-9;

/// States `u(t_i)` on the uniform grid `t_i = i·dt`, `i = 0..=N`, recorded
/// after burn-in. Immutable once built.
#[derive(Debug, Clone)]
pub struct Trajectory {
    dt: f64,
    states: Vec<DVector<f64>>,
    param: f64,
}

impl Trajectory {
    /// Wraps existing states. Needs at least two nodes of equal dimension.
    pub fn from_states(dt: f64, states: Vec<DVector<f64>>, param: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "dt must be positive, got {dt}"
            )));
        }
        if states.len() < 2 {
            return Err(Error::InvalidArgument(
                "a trajectory needs at least two grid nodes".into(),
            ));
        }
        let n = states[0].len();
        if states.iter().any(|u| u.len() != n) {
            return Err(Error::InvalidArgument(
                "inconsistent state dimensions".into(),
            ));
        }
        if let Some(step) = states.iter().position(|u| u.iter().any(|x| !x.is_finite())) {
            return Err(Error::NonFiniteState { step });
        }
        Ok(Self { dt, states, param })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of intervals `N`.
    pub fn n_steps(&self) -> usize {
        self.states.len() - 1
    }

    pub fn states(&self) -> &[DVector<f64>] {
        &self.states
    }

    pub fn param(&self) -> f64 {
        self.param
    }

    /// `T = N·dt`.
    pub fn horizon(&self) -> f64 {
        self.n_steps() as f64 * self.dt
    }

    pub fn dim(&self) -> usize {
        self.states[0].len()
    }

    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.dt
    }

    /// Writes `t,u0,u1,...` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["t".to_string()];
        header.extend((0..self.dim()).map(|k| format!("u{k}")));
        w.write_record(&header)?;
        for (i, u) in self.states.iter().enumerate() {
            let mut row = vec![fmt_f64(self.time(i))];
            row.extend(u.iter().map(|&x| fmt_f64(x)));
            w.write_record(&row)?;
        }
        w.flush().map_err(|e| Error::io("<trajectory csv>", e))?;
        Ok(())
    }

    /// Reads the format produced by [`Trajectory::write_csv`]. The time
    /// column must be uniform; `param` is not stored in the file.
    pub fn read_csv<R: Read>(input: R, param: f64) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let header = r.headers()?.clone();
        if header.get(0) != Some("t") || header.len() < 2 {
            return Err(Error::TrajectoryFormat(
                "expected header `t,u0,u1,...`".into(),
            ));
        }
        let mut times = Vec::new();
        let mut states = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let vals = rec
                .iter()
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::TrajectoryFormat(e.to_string()))?;
            times.push(vals[0]);
            states.push(DVector::from_row_slice(&vals[1..]));
        }
        if times.len() < 2 {
            return Err(Error::TrajectoryFormat("need at least two rows".into()));
        }
        let n = times.len() - 1;
        let dt = (times[n] - times[0]) / n as f64;
        for (i, &t) in times.iter().enumerate() {
            if (t - times[0] - i as f64 * dt).abs() > 1e-9 * (1.0 + t.abs()) {
                return Err(Error::TrajectoryFormat(format!(
                    "non-uniform time grid at row {i}"
                )));
            }
        }
        Self::from_states(dt, states, param)
    }
}

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// One explicit midpoint (RK2) step.
pub fn midpoint_step<S: DynamicalSystem + ?Sized>(
    sys: &S,
    u: &DVector<f64>,
    s: f64,
    dt: f64,
) -> DVector<f64> {
    let k1 = sys.f(u, s);
    let mid = u + &k1 * (0.5 * dt);
    u + sys.f(&mid, s) * dt
}

/// Number of whole steps of size `dt` in `span`, or `GridMismatch`.
pub fn grid_steps(span: f64, dt: f64) -> Result<usize> {
    let ratio = span / dt;
    let rounded = ratio.round();
    if !(ratio.is_finite())
        || (ratio - rounded).abs() > GRID_TOL * rounded.max(1.0)
        || rounded < 1.0
    {
        return Err(Error::GridMismatch { horizon: span, dt });
    }
    Ok(rounded as usize)
}

/// Integrates from `u0` for `burn_in` time units, discards that transient,
/// and records `T/dt + 1` states over the following `horizon` time units.
///
/// The burn-in uses `round(burn_in/dt)` steps.
pub fn integrate_trajectory<S: DynamicalSystem + ?Sized>(
    sys: &S,
    s: f64,
    u0: &DVector<f64>,
    burn_in: f64,
    horizon: f64,
    dt: f64,
) -> Result<Trajectory> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "dt must be positive, got {dt}"
        )));
    }
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    if !(burn_in.is_finite() && burn_in >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "burn-in must be non-negative, got {burn_in}"
        )));
    }
    if u0.len() != sys.dim() {
        return Err(Error::InvalidArgument(format!(
            "initial state has dimension {}, system has {}",
            u0.len(),
            sys.dim()
        )));
    }
    let n_steps = grid_steps(horizon, dt)?;
    let burn_steps = (burn_in / dt).round() as usize;

    let mut u = u0.clone();
    for step in 0..burn_steps {
        u = midpoint_step(sys, &u, s, dt);
        if u.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteState { step });
        }
    }

    let mut states = Vec::with_capacity(n_steps + 1);
    states.push(u);
    for step in 0..n_steps {
        let next = midpoint_step(sys, &states[step], s, dt);
        if next.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteState {
                step: burn_steps + step + 1,
            });
        }
        states.push(next);
    }
    Ok(Trajectory {
        dt,
        states,
        param: s,
    })
}

/// Trapezoid weights `ω_i`: ½ at both ends, 1 inside.
pub(crate) fn trapezoid_weight(i: usize, n_steps: usize) -> f64 {
    if i == 0 || i == n_steps {
        0.5
    } else {
        1.0
    }
}

/// Trapezoidal estimate of `(1/T) ∫ J(u(t), s) dt`.
pub fn time_average<S: DynamicalSystem + ?Sized>(traj: &Trajectory, sys: &S) -> f64 {
    let n = traj.n_steps();
    let s = traj.param();
    let sum: f64 = traj
        .states()
        .iter()
        .enumerate()
        .map(|(i, u)| trapezoid_weight(i, n) * sys.output(u, s))
        .sum();
    sum / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{linear_test_system, Lorenz63};

    #[test]
    fn fixed_point_stays_put() {
        let sys = linear_test_system(1.0).unwrap();
        for dt in [0.5, 0.02, 0.001] {
            let traj =
                integrate_trajectory(&sys, 3.0, &DVector::from_element(1, 3.0), 1.0, 2.0, dt)
                    .unwrap();
            assert!(traj.states().iter().all(|u| u[0] == 3.0));
            assert_eq!(time_average(&traj, &sys), 3.0);
        }
    }

    #[test]
    fn grid_arithmetic() {
        let sys = linear_test_system(1.0).unwrap();
        let traj = integrate_trajectory(&sys, 0.0, &DVector::from_element(1, 1.0), 0.0, 50.0, 0.02)
            .unwrap();
        assert_eq!(traj.n_steps(), 2500);
        assert_eq!(traj.states().len(), 2501);
        assert!((traj.horizon() - 50.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_integral_grid() {
        let sys = linear_test_system(1.0).unwrap();
        let u0 = DVector::from_element(1, 1.0);
        assert!(matches!(
            integrate_trajectory(&sys, 0.0, &u0, 0.0, 1.0, 0.3),
            Err(Error::GridMismatch { .. })
        ));
        assert!(integrate_trajectory(&sys, 0.0, &u0, 0.0, 1.0, -0.1).is_err());
        assert!(integrate_trajectory(&sys, 0.0, &u0, -1.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn blow_up_is_reported() {
        // dt far beyond the stability limit of the explicit scheme.
        let sys = linear_test_system(1.0).unwrap();
        let err = integrate_trajectory(&sys, 0.0, &DVector::from_element(1, 1.0), 0.0, 2e5, 100.0)
            .unwrap_err();
        assert!(matches!(err, Error::NonFiniteState { .. }), "{err}");
    }

    #[test]
    fn states_are_unedited_midpoint_steps() {
        let sys = Lorenz63::new();
        let u0 = DVector::from_row_slice(&[1.0, 2.0, 20.0]);
        let traj = integrate_trajectory(&sys, 28.0, &u0, 1.0, 5.0, 0.01).unwrap();
        for w in traj.states().windows(2) {
            let again = midpoint_step(&sys, &w[0], 28.0, 0.01);
            assert_eq!(again, w[1]);
        }
    }

    #[test]
    fn midpoint_is_second_order() {
        let a = 1.3;
        let sys = linear_test_system(a).unwrap();
        let (s, u0, t) = (2.0, 5.0, 3.0);
        let exact = s + (u0 - s) * (-a * t).exp();
        let err = |dt: f64| {
            let traj =
                integrate_trajectory(&sys, s, &DVector::from_element(1, u0), 0.0, t, dt).unwrap();
            (traj.states().last().unwrap()[0] - exact).abs()
        };
        let ratio = err(0.02) / err(0.01);
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn lorenz_trajectory_is_bounded() {
        let sys = Lorenz63::new();
        let u0 = DVector::from_row_slice(&[-3.0, 7.0, 1.0]);
        let traj = integrate_trajectory(&sys, 28.0, &u0, 10.0, 100.0, 0.02).unwrap();
        assert!(traj.states().iter().all(|u| u[2].abs() < 60.0));
        let avg = time_average(&traj, &sys);
        assert!((20.0..=27.0).contains(&avg), "<z> = {avg}");
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let sys = Lorenz63::new();
        let u0 = DVector::from_row_slice(&[1.0, 1.0, 1.0]);
        let traj = integrate_trajectory(&sys, 28.0, &u0, 0.5, 1.0, 0.02).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("t,u0,u1,u2\n"));
        let back = Trajectory::read_csv(buf.as_slice(), 28.0).unwrap();
        assert_eq!(back.states(), traj.states());
        assert_eq!(back.n_steps(), traj.n_steps());
        assert!((back.dt() - 0.02).abs() < 1e-15);
    }

    #[test]
    fn csv_rejects_ragged_time_grid() {
        let text = "t,u0\n0,1\n0.1,1\n0.3,1\n";
        assert!(Trajectory::read_csv(text.as_bytes(), 0.0).is_err());
    }
}
