//! # shadowlab
//!
//! Derivatives of long-time averages of chaotic ODEs with respect to a
//! parameter, computed by least squares shadowing without a time-dilation
//! term. The unbounded growth of the resulting shadowing direction is
//! tamed by weighting the time average with a window function that
//! vanishes at both ends.
//!
//! The pipeline is:
//!
//! 1. [`integrate::integrate_trajectory`] discards a burn-in and stores a
//!    trajectory on a uniform grid;
//! 2. [`tangent::solve_tangent`] finds the minimum-norm solution of the
//!    linearized equation along it (or [`adjoint::solve_adjoint`] solves the
//!    dual problem for a given window);
//! 3. [`tangent::tangent_sensitivity`] / [`adjoint::adjoint_sensitivity`]
//!    form the windowed derivative estimate.
//!
//! Runnable walkthroughs of each capability live in `examples/`:
//!
//! ```bash
//! cargo run --release --example lorenz_sensitivity
//! ```

pub mod adjoint;
pub mod blocktridiag;
pub mod cli;
pub mod ensemble;
pub mod error;
pub mod integrate;
mod lss;
mod quadrature;
pub mod report;
pub mod stats;
pub mod svg;
pub mod system;
pub mod tangent;
pub mod window;

pub use adjoint::{adjoint_sensitivity, solve_adjoint, AdjointSolution};
pub use blocktridiag::{solve_block_tridiagonal, BlockTridiagonalSystem};
pub use error::{Error, Result};
pub use integrate::{integrate_trajectory, time_average, Trajectory};
pub use report::{Method, SensitivityReport};
pub use system::{
    linear_test_system, DynamicalSystem, LinearRelaxation, Lorenz63, LorenzParameter, LorenzParams,
};
pub use tangent::{solve_tangent, tangent_sensitivity, TangentSolution};
pub use window::{make_window, windowed_average, WindowFunction, WindowKind};
