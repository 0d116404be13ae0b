//! The five built-in windows: unit means, shape at a few points, and how
//! fast each one leaves zero at the endpoints.
//!
//! ```bash
//! cargo run --example windows
//! ```

use shadowlab::{WindowFunction, WindowKind};

fn main() {
    println!(
        "{:>7} {:>10} {:>10} {:>12} {:>12}",
        "window", "mean", "w(0.5)", "w(1e-2)", "w(1e-3)"
    );
    for kind in WindowKind::ALL {
        let w = WindowFunction::new(kind);
        println!(
            "{:>7} {:>10.8} {:>10.6} {:>12.3e} {:>12.3e}{}",
            kind,
            w.mean(),
            w.eval(0.5),
            w.eval(1e-2),
            w.eval(1e-3),
            if w.admissible() {
                ""
            } else {
                "  (not admissible)"
            }
        );
    }

    // Any function on [0, 1] can be used; admissibility is checked numerically.
    let tent = WindowFunction::custom(
        "tent",
        |s| 4.0 * s.min(1.0 - s),
        |s| if s < 0.5 { 4.0 } else { -4.0 },
    );
    println!(
        "custom tent: mean {:.6}, admissible {}",
        tent.mean(),
        tent.admissible()
    );
}
