//! du/dt = a(s − u), J = u has d⟨J⟩/ds = 1 exactly. The shadowing
//! direction is 1 away from a boundary layer at t = 0, and the windowed
//! estimate converges to 1 as T grows, at a rate set by the window's
//! behaviour at the endpoints.
//!
//! ```bash
//! cargo run --release --example linear_fixture
//! ```

use nalgebra::DVector;
use shadowlab::{
    integrate_trajectory, linear_test_system, solve_tangent, tangent_sensitivity, WindowFunction,
    WindowKind,
};

fn main() -> shadowlab::Result<()> {
    let sys = linear_test_system(1.0)?;
    println!(
        "{:>6} {}",
        "T",
        WindowKind::ALL.map(|k| format!("{k:>12}")).join("")
    );
    for horizon in [10.0, 20.0, 50.0, 100.0] {
        let traj = integrate_trajectory(
            &sys,
            2.0,
            &DVector::from_element(1, 0.0),
            5.0,
            horizon,
            0.02,
        )?;
        let sol = solve_tangent(&traj, &sys)?;
        let errs: Vec<String> = WindowKind::ALL
            .iter()
            .map(|&k| {
                let d = tangent_sensitivity(&traj, &sys, &sol, &WindowFunction::new(k))
                    .map(|r| r.derivative);
                format!("{:>12.2e}", d.map_or(f64::NAN, |d| d - 1.0))
            })
            .collect();
        println!("{horizon:>6} {}", errs.join(""));
    }
    println!("errors d - 1; sine decays like -pi^2/T^2, the smoother windows faster");
    Ok(())
}
