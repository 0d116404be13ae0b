//! Norm of the shadowing direction along a T = 100 trajectory. Without
//! time dilation it grows away from a minimum near the middle of the
//! horizon. Writes `envelope.svg` to the given directory.
//!
//! ```bash
//! cargo run --release --example envelope -- /tmp
//! ```

use std::path::PathBuf;

use shadowlab::ensemble::initial_condition;
use shadowlab::svg::{LinePlot, Series};
use shadowlab::{
    integrate_trajectory, solve_tangent, tangent_sensitivity, Lorenz63, WindowFunction, WindowKind,
};

fn main() -> shadowlab::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    let sys = Lorenz63::new();
    let traj = integrate_trajectory(&sys, 28.0, &initial_condition(7, 3), 10.0, 100.0, 0.02)?;
    let sol = solve_tangent(&traj, &sys)?;
    let rep = tangent_sensitivity(&traj, &sys, &sol, &WindowFunction::new(WindowKind::Sine2))?;

    let loc = rep
        .argmin_location
        .expect("tangent reports carry an envelope");
    println!("min |v| at t = {:.2} ({:.3} of T)", loc * rep.horizon, loc);
    for t in [0.0, 25.0, 50.0, 75.0, 100.0] {
        let i = (t / traj.dt()).round() as usize;
        println!("  |v({t:>5})| = {:8.3}", rep.envelope[i].1);
    }

    let path = out.join("envelope.svg");
    LinePlot::new("shadowing direction, rho = 28", "t", "|v(t)|")
        .with_series(Series::new("|v|", rep.envelope.clone()))
        .write(&path)?;
    println!("wrote {}", path.display());
    Ok(())
}
