//! d⟨z⟩/dρ for Lorenz-63 at ρ = 28 from a single trajectory, with every
//! window and both the tangent and the adjoint route.
//!
//! ```bash
//! cargo run --release --example lorenz_sensitivity
//! ```

use nalgebra::DVector;
use shadowlab::{
    adjoint_sensitivity, integrate_trajectory, solve_adjoint, solve_tangent, tangent_sensitivity,
    Lorenz63, WindowFunction, WindowKind,
};

fn main() -> shadowlab::Result<()> {
    let sys = Lorenz63::new();
    let u0 = DVector::from_row_slice(&[1.0, 1.0, 20.0]);
    let traj = integrate_trajectory(&sys, 28.0, &u0, 10.0, 50.0, 0.02)?;
    println!("T = {}, {} steps", traj.horizon(), traj.n_steps());

    // One tangent solve serves every window.
    let tangent = solve_tangent(&traj, &sys)?;
    println!(
        "KKT residuals: constraint {:.1e}, optimality {:.1e}",
        tangent.constraint_residual, tangent.optimality_residual
    );

    println!("{:>8} {:>12} {:>12}", "window", "tangent", "adjoint");
    for kind in WindowKind::ALL {
        let w = WindowFunction::new(kind);
        let t = tangent_sensitivity(&traj, &sys, &tangent, &w)?;
        let a = adjoint_sensitivity(&traj, &sys, &solve_adjoint(&traj, &sys, &w)?)?;
        println!("{:>8} {:>12.6} {:>12.6}", kind, t.derivative, a.derivative);
    }
    Ok(())
}
