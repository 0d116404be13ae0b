//! Discrete least squares shadowing operator shared by the tangent and
//! adjoint solvers.
//!
//! Unknowns are the node values `v_0..v_N`. Each interval contributes the
//! exact linearization of the explicit midpoint step that generated the
//! trajectory, `u_{i+1} = Φ(u_i, s) = u_i + dt f(u_i + (dt/2) f(u_i, s), s)`:
//!
//! ```text
//! E_i v_i + F_i v_{i+1} = h_i
//! E_i = −Φ_u(u_i) = −(I + dt A_m (I + (dt/2) A_i))
//! F_i =  I
//! h_i =  Φ_s(u_i) = dt (f_s(m_i) + (dt/2) A_m f_s(u_i))
//! ```
//!
//! with `m_i` the midpoint state, `A_i = f_u(u_i)` and `A_m = f_u(m_i)`.
//! Linearizing the integrator itself means differences of neighbouring
//! discrete trajectories satisfy the homogeneous constraint exactly, so the
//! neutral (time-shift) mode of the map is kept. A separately discretized
//! tangent equation (trapezoidal, say) is only consistent with it to
//! O(dt²), and on the stiff contracting directions of Lorenz that mismatch
//! is large enough to bias the minimum-norm solution.
//!
//! The objective is `½ Σ m_i ‖v_i‖²` with `m_i = dt·ω_i` (trapezoid
//! weights). `B` denotes the constraint matrix and `M = diag(m_i)`, so the
//! Schur complement `S = B M⁻¹ Bᵀ` is block tridiagonal with `N` blocks.

use nalgebra::{DMatrix, DVector};

use crate::blocktridiag::{solve_block_tridiagonal, BlockTridiagonalSystem};
use crate::error::{Error, Result};
use crate::integrate::{trapezoid_weight, Trajectory};
use crate::system::DynamicalSystem;

pub(crate) struct LssOperator {
    e: Vec<DMatrix<f64>>,
    f: Vec<DMatrix<f64>>,
    h: Vec<DVector<f64>>,
    mass: Vec<f64>,
}

fn all_finite<'a>(mut it: impl Iterator<Item = &'a f64>) -> bool {
    it.all(|x| x.is_finite())
}

impl LssOperator {
    pub(crate) fn build<S: DynamicalSystem + ?Sized>(traj: &Trajectory, sys: &S) -> Result<Self> {
        if traj.dim() != sys.dim() {
            return Err(Error::InvalidArgument(format!(
                "trajectory dimension {} does not match system dimension {}",
                traj.dim(),
                sys.dim()
            )));
        }
        let n_steps = traj.n_steps();
        let dt = traj.dt();
        let s = traj.param();
        let dim = traj.dim();

        let eye = DMatrix::<f64>::identity(dim, dim);
        let half = 0.5 * dt;
        let mut e = Vec::with_capacity(n_steps);
        let mut h = Vec::with_capacity(n_steps);
        for (i, u) in traj.states()[..n_steps].iter().enumerate() {
            let mid = u + sys.f(u, s) * half;
            let a_u = sys.f_u(u, s);
            let a_m = sys.f_u(&mid, s);
            let fs_u = sys.f_s(u, s);
            let fs_m = sys.f_s(&mid, s);
            let step_u = &eye + &a_m * (&eye + &a_u * half) * dt;
            let step_s = (fs_m + &a_m * fs_u * half) * dt;
            if !all_finite(step_u.iter()) || !all_finite(step_s.iter()) {
                return Err(Error::NonFiniteState { step: i });
            }
            e.push(-step_u);
            h.push(step_s);
        }
        let f = vec![eye; n_steps];
        let mass = (0..=n_steps)
            .map(|i| dt * trapezoid_weight(i, n_steps))
            .collect();
        Ok(Self { e, f, h, mass })
    }

    pub(crate) fn forcing(&self) -> &[DVector<f64>] {
        &self.h
    }

    /// `B v`, one entry per interval.
    pub(crate) fn apply_b(&self, v: &[DVector<f64>]) -> Vec<DVector<f64>> {
        self.e
            .iter()
            .zip(&self.f)
            .enumerate()
            .map(|(i, (e, f))| e * &v[i] + f * &v[i + 1])
            .collect()
    }

    /// `Bᵀ λ`, one entry per node.
    pub(crate) fn apply_bt(&self, lam: &[DVector<f64>]) -> Vec<DVector<f64>> {
        let n_steps = self.e.len();
        (0..=n_steps)
            .map(|j| {
                let mut acc = DVector::zeros(lam[0].len());
                if j < n_steps {
                    acc += self.e[j].tr_mul(&lam[j]);
                }
                if j > 0 {
                    acc += self.f[j - 1].tr_mul(&lam[j - 1]);
                }
                acc
            })
            .collect()
    }

    pub(crate) fn apply_mass_inv(&self, x: &[DVector<f64>]) -> Vec<DVector<f64>> {
        x.iter().zip(&self.mass).map(|(v, m)| v / *m).collect()
    }

    /// Solves `S x = rhs` with `S = B M⁻¹ Bᵀ`.
    pub(crate) fn solve_schur(&self, rhs: Vec<DVector<f64>>) -> Result<Vec<DVector<f64>>> {
        let n_steps = self.e.len();
        let diag = (0..n_steps)
            .map(|i| {
                &self.e[i] * self.e[i].transpose() / self.mass[i]
                    + &self.f[i] * self.f[i].transpose() / self.mass[i + 1]
            })
            .collect();
        // Row i+1, column i: E_{i+1} M_{i+1}⁻¹ F_iᵀ.
        let offdiag = (0..n_steps.saturating_sub(1))
            .map(|i| &self.e[i + 1] * self.f[i].transpose() / self.mass[i + 1])
            .collect();
        let sys = BlockTridiagonalSystem { diag, offdiag, rhs };
        solve_block_tridiagonal(&sys).map_err(|e| match e {
            Error::NotPositiveDefinite { .. } => Error::SolverFailure(Box::new(e)),
            other => other,
        })
    }
}
