//! Plugging in your own ODE: the Rössler system with parameter c and
//! output ⟨z⟩. Only `f`, the output and their analytic derivatives are
//! needed.
//!
//! ```bash
//! cargo run --release --example custom_system
//! ```

use nalgebra::{DMatrix, DVector};
use shadowlab::{
    adjoint_sensitivity, integrate_trajectory, solve_adjoint, solve_tangent, tangent_sensitivity,
    DynamicalSystem, WindowFunction, WindowKind,
};

struct Rossler {
    a: f64,
    b: f64,
}

impl DynamicalSystem for Rossler {
    fn dim(&self) -> usize {
        3
    }

    fn f(&self, u: &DVector<f64>, c: f64) -> DVector<f64> {
        DVector::from_row_slice(&[
            -u[1] - u[2],
            u[0] + self.a * u[1],
            self.b + u[2] * (u[0] - c),
        ])
    }

    fn f_u(&self, u: &DVector<f64>, c: f64) -> DMatrix<f64> {
        DMatrix::from_row_slice(
            3,
            3,
            &[0.0, -1.0, -1.0, 1.0, self.a, 0.0, u[2], 0.0, u[0] - c],
        )
    }

    fn f_s(&self, u: &DVector<f64>, _c: f64) -> DVector<f64> {
        DVector::from_row_slice(&[0.0, 0.0, -u[2]])
    }

    fn output(&self, u: &DVector<f64>, _c: f64) -> f64 {
        u[2]
    }

    fn output_u(&self, _u: &DVector<f64>, _c: f64) -> DVector<f64> {
        DVector::from_row_slice(&[0.0, 0.0, 1.0])
    }

    fn output_s(&self, _u: &DVector<f64>, _c: f64) -> f64 {
        0.0
    }
}

fn main() -> shadowlab::Result<()> {
    let sys = Rossler { a: 0.2, b: 0.2 };
    let c = 5.7;
    let u0 = DVector::from_row_slice(&[1.0, 1.0, 0.0]);
    let traj = integrate_trajectory(&sys, c, &u0, 100.0, 500.0, 0.02)?;
    let w = WindowFunction::new(WindowKind::Sine2);
    let t = tangent_sensitivity(&traj, &sys, &solve_tangent(&traj, &sys)?, &w)?;
    let a = adjoint_sensitivity(&traj, &sys, &solve_adjoint(&traj, &sys, &w)?)?;
    println!(
        "Rossler d<z>/dc at c = {c}: tangent {:.6}, adjoint {:.6}",
        t.derivative, a.derivative
    );
    Ok(())
}
