//! Spread of the derivative estimate across initial conditions, per window
//! and horizon, with 95% chi-squared intervals for the standard deviation.
//!
//! ```bash
//! cargo run --release --example ensemble_std -- 100
//! ```

use shadowlab::ensemble::{initial_conditions, run_ensemble, summarize, RunSettings};
use shadowlab::{Lorenz63, Method, WindowFunction, WindowKind};

fn main() {
    let members: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(50);
    let sys = Lorenz63::new();
    let windows: Vec<_> = WindowKind::ALL
        .iter()
        .map(|&k| WindowFunction::new(k))
        .collect();
    let ics = initial_conditions(0, members, 3);

    println!(
        "{:>6} {:>7} {:>9} {:>9} {:>21}",
        "T", "window", "mean", "std", "95% ci"
    );
    for horizon in [25.0, 50.0, 100.0] {
        let settings = RunSettings {
            horizon,
            ..RunSettings::default()
        };
        let res = run_ensemble(&sys, 28.0, &ics, &settings, &windows, &[Method::Tangent]);
        for st in summarize(&windows, &res, 0.95) {
            println!(
                "{horizon:>6} {:>7} {:>9.4} {:>9.4}   [{:.4}, {:.4}]",
                st.window, st.mean, st.std, st.ci_low, st.ci_high
            );
        }
    }
}
