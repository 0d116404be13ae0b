//! The adjoint route for one window: the dual fields, their boundary
//! values, and agreement with the tangent route.
//!
//! ```bash
//! cargo run --release --example adjoint_fields
//! ```

use shadowlab::ensemble::initial_condition;
use shadowlab::{
    adjoint_sensitivity, integrate_trajectory, solve_adjoint, solve_tangent, tangent_sensitivity,
    Lorenz63, WindowFunction, WindowKind,
};

fn main() -> shadowlab::Result<()> {
    let sys = Lorenz63::new();
    let traj = integrate_trajectory(&sys, 28.0, &initial_condition(3, 3), 10.0, 50.0, 0.02)?;
    let w = WindowFunction::new(WindowKind::Bump);

    let adj = solve_adjoint(&traj, &sys, &w)?;
    let n = traj.n_steps();
    let peak = adj.v_hat.iter().map(|x| x.norm()).fold(0.0, f64::max);
    println!(
        "|v_hat| at t = 0, T: {}, {}; max {peak:.3}",
        adj.v_hat[0].norm(),
        adj.v_hat[n].norm()
    );
    for t in [5.0, 25.0, 45.0] {
        let i = (t / traj.dt()) as usize;
        println!(
            "  t = {t:>4}: v_hat = {:>9.4?}  w_hat = {:>9.4?}",
            adj.v_hat[i].as_slice(),
            adj.w_hat[i].as_slice()
        );
    }

    let a = adjoint_sensitivity(&traj, &sys, &adj)?.derivative;
    let t = tangent_sensitivity(&traj, &sys, &solve_tangent(&traj, &sys)?, &w)?.derivative;
    println!(
        "tangent {t:.12}\nadjoint {a:.12}\nrelative difference {:.1e}",
        (t - a).abs() / t.abs()
    );
    Ok(())
}
