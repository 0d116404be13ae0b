//! Ensemble-mean d⟨z⟩/dρ over ρ ∈ [25, 35] for the square, sine2 and sine4
//! windows. Printed as CSV.
//!
//! ```bash
//! cargo run --release --example rho_sweep -- 50   # members per ρ
//! ```

use shadowlab::ensemble::{initial_conditions, run_ensemble, summarize, RunSettings};
use shadowlab::{Lorenz63, Method, WindowFunction, WindowKind};

fn main() {
    let members: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(20);
    let sys = Lorenz63::new();
    let windows =
        [WindowKind::Square, WindowKind::Sine2, WindowKind::Sine4].map(WindowFunction::new);
    let ics = initial_conditions(0, members, 3);
    let settings = RunSettings::default();

    println!("rho,window,n,mean,std");
    for rho in (25..=35).map(f64::from) {
        let res = run_ensemble(&sys, rho, &ics, &settings, &windows, &[Method::Tangent]);
        for st in summarize(&windows, &res, 0.95) {
            println!("{rho},{},{},{:.5},{:.5}", st.window, st.n, st.mean, st.std);
        }
    }
}
