//! Outside the quasi-hyperbolic range the estimate loses its reliability.
//! At ρ = 50 the spread across initial conditions is roughly ten times
//! the spread at ρ = 28 for the same horizon.
//!
//! ```bash
//! cargo run --release --example rho50
//! ```

use shadowlab::ensemble::{initial_conditions, run_ensemble, summarize, RunSettings};
use shadowlab::{Lorenz63, Method, WindowFunction, WindowKind};

fn main() {
    let sys = Lorenz63::new();
    let windows = [WindowFunction::new(WindowKind::Sine2)];
    let ics = initial_conditions(0, 40, 3);
    for rho in [28.0, 50.0] {
        for horizon in [50.0, 100.0] {
            let settings = RunSettings {
                horizon,
                ..RunSettings::default()
            };
            let res = run_ensemble(&sys, rho, &ics, &settings, &windows, &[Method::Tangent]);
            let st = &summarize(&windows, &res, 0.95)[0];
            println!(
                "rho = {rho}, T = {horizon}: mean {:.3}, std {:.3} (95% ci {:.3}..{:.3}), {} ok",
                st.mean, st.std, st.ci_low, st.ci_high, st.n
            );
        }
    }
}
