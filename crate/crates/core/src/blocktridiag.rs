//! Block Cholesky (block Thomas) solver for symmetric positive-definite
//! block-tridiagonal systems.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// `A x = b` with `A` symmetric block-tridiagonal: `diag[i]` on the block
/// diagonal, `offdiag[i]` the block at row `i + 1`, column `i`, and its
/// transpose above the diagonal.
#[derive(Debug, Clone)]
pub struct BlockTridiagonalSystem {
    pub diag: Vec<DMatrix<f64>>,
    pub offdiag: Vec<DMatrix<f64>>,
    pub rhs: Vec<DVector<f64>>,
}

impl BlockTridiagonalSystem {
    pub fn n_blocks(&self) -> usize {
        self.diag.len()
    }

    pub fn block_dim(&self) -> usize {
        self.diag.first().map_or(0, |d| d.nrows())
    }

    fn validate(&self) -> Result<()> {
        let m = self.n_blocks();
        let n = self.block_dim();
        if m == 0 || n == 0 {
            return Err(Error::InvalidArgument("empty block system".into()));
        }
        if self.offdiag.len() + 1 != m || self.rhs.len() != m {
            return Err(Error::InvalidArgument(format!(
                "expected {} off-diagonal blocks and {m} right-hand sides, got {} and {}",
                m - 1,
                self.offdiag.len(),
                self.rhs.len()
            )));
        }
        let square = |b: &DMatrix<f64>| b.nrows() == n && b.ncols() == n;
        if !self.diag.iter().all(square)
            || !self.offdiag.iter().all(square)
            || !self.rhs.iter().all(|r| r.len() == n)
        {
            return Err(Error::InvalidArgument("inconsistent block sizes".into()));
        }
        Ok(())
    }

    /// Dense `mn × mn` matrix. Meant for tests and diagnostics.
    pub fn assemble_dense(&self) -> DMatrix<f64> {
        let m = self.n_blocks();
        let n = self.block_dim();
        let mut a = DMatrix::zeros(m * n, m * n);
        for (i, d) in self.diag.iter().enumerate() {
            a.view_mut((i * n, i * n), (n, n)).copy_from(d);
        }
        for (i, c) in self.offdiag.iter().enumerate() {
            a.view_mut(((i + 1) * n, i * n), (n, n)).copy_from(c);
            a.view_mut((i * n, (i + 1) * n), (n, n))
                .copy_from(&c.transpose());
        }
        a
    }

    pub fn assemble_rhs(&self) -> DVector<f64> {
        let n = self.block_dim();
        let mut b = DVector::zeros(self.n_blocks() * n);
        for (i, r) in self.rhs.iter().enumerate() {
            b.rows_mut(i * n, n).copy_from(r);
        }
        b
    }
}

/// Solves the system by block Cholesky factorization `A = L Lᵀ`, `L` block
/// lower-bidiagonal, followed by forward and back substitution.
pub fn solve_block_tridiagonal(sys: &BlockTridiagonalSystem) -> Result<Vec<DVector<f64>>> {
    sys.validate()?;
    let m = sys.n_blocks();

    let mut diag_factors: Vec<DMatrix<f64>> = Vec::with_capacity(m);
    // sub[i] = L_{i+1,i}
    let mut sub: Vec<DMatrix<f64>> = Vec::with_capacity(m - 1);
    let mut y: Vec<DVector<f64>> = Vec::with_capacity(m);

    for i in 0..m {
        let mut pivot = sys.diag[i].clone();
        let mut rhs = sys.rhs[i].clone();
        if i > 0 {
            let l = &sub[i - 1];
            pivot -= l * l.transpose();
            rhs -= l * &y[i - 1];
        }
        let chol = pivot
            .cholesky()
            .ok_or(Error::NotPositiveDefinite { block: i })?;
        let lii = chol.l();
        let yi = lii
            .solve_lower_triangular(&rhs)
            .ok_or(Error::NotPositiveDefinite { block: i })?;
        if i + 1 < m {
            // L_{i+1,i} = C_i L_iiᵀ⁻¹, i.e. L_ii L_{i+1,i}ᵀ = C_iᵀ.
            let lt = lii
                .solve_lower_triangular(&sys.offdiag[i].transpose())
                .ok_or(Error::NotPositiveDefinite { block: i })?;
            sub.push(lt.transpose());
        }
        diag_factors.push(lii);
        y.push(yi);
    }

    let mut x: Vec<DVector<f64>> = vec![DVector::zeros(0); m];
    for i in (0..m).rev() {
        let mut rhs = y[i].clone();
        if i + 1 < m {
            rhs -= sub[i].transpose() * &x[i + 1];
        }
        x[i] = diag_factors[i]
            .tr_solve_lower_triangular(&rhs)
            .ok_or(Error::NotPositiveDefinite { block: i })?;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_identity_block() {
        let b = DVector::from_row_slice(&[1.5, -2.0, 7.0]);
        let sys = BlockTridiagonalSystem {
            diag: vec![DMatrix::identity(3, 3)],
            offdiag: vec![],
            rhs: vec![b.clone()],
        };
        assert_eq!(solve_block_tridiagonal(&sys).unwrap()[0], b);
    }

    #[test]
    fn scalar_second_difference() {
        // tridiag(−1, 2, −1) x = e₁ on 5 unknowns: x_k = (6 − k)/6, k = 1..5.
        let m = 5;
        let sys = BlockTridiagonalSystem {
            diag: vec![DMatrix::from_element(1, 1, 2.0); m],
            offdiag: vec![DMatrix::from_element(1, 1, -1.0); m - 1],
            rhs: (0..m)
                .map(|i| DVector::from_element(1, if i == 0 { 1.0 } else { 0.0 }))
                .collect(),
        };
        let x = solve_block_tridiagonal(&sys).unwrap();
        for (k, xi) in x.iter().enumerate() {
            let exact = (5 - k) as f64 / 6.0;
            assert!((xi[0] - exact).abs() < 1e-14);
        }
    }

    #[test]
    fn indefinite_pivot_is_reported() {
        let sys = BlockTridiagonalSystem {
            diag: vec![DMatrix::identity(2, 2), -DMatrix::identity(2, 2)],
            offdiag: vec![DMatrix::zeros(2, 2)],
            rhs: vec![DVector::zeros(2), DVector::zeros(2)],
        };
        assert!(matches!(
            solve_block_tridiagonal(&sys),
            Err(Error::NotPositiveDefinite { block: 1 })
        ));
    }

    #[test]
    fn size_mismatch_is_rejected() {
        let sys = BlockTridiagonalSystem {
            diag: vec![DMatrix::identity(2, 2); 2],
            offdiag: vec![],
            rhs: vec![DVector::zeros(2); 2],
        };
        assert!(matches!(
            solve_block_tridiagonal(&sys),
            Err(Error::InvalidArgument(_))
        ));
    }
}
