//! Discrete negative Laplacian: 3-point (1D) / 5-point (2D) stencil with
//! Shortley–Weller shortened arms at nodes adjacent to a curved boundary.
//!
//! Rows keep the M-matrix sign pattern (positive diagonal, non-positive
//! off-diagonals). With no cut cells the operator is symmetric; shortened
//! arms make it non-symmetric, which the linear solvers account for.

use std::sync::Arc;

use crate::error::{CoreError, Result};
use crate::field::ScalarField;
use crate::grid::Grid;
use crate::scalar::{as_f64, real, Real};

/// Sparse stencil representation of the discrete `-Δ`.
#[derive(Debug)]
pub struct LaplacianOperator<T: Real> {
    grid: Arc<Grid<T>>,
    diag: Vec<T>,
    row_ptr: Vec<u32>,
    cols: Vec<u32>,
    coeffs: Vec<T>,
    symmetric: bool,
}

/// Assembles the discrete negative Laplacian on a grid.
///
/// Errors with `DegenerateCutCell` when a boundary arm fraction drops below
/// 1e-6 (the node sits essentially on the boundary; rebuild with another h).
pub fn assemble_laplacian<T: Real>(grid: &Arc<Grid<T>>) -> Result<LaplacianOperator<T>> {
    let n = grid.node_count();
    let h = grid.h();
    let two = real::<T>(2.0);
    let min_fraction = real::<T>(1e-6);

    let mut diag = vec![T::zero(); n];
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut cols = Vec::new();
    let mut coeffs = Vec::new();
    let mut symmetric = true;

    row_ptr.push(0);
    for k in 0..n {
        let arms = grid.arms(k);
        for axis in 0..grid.dim() {
            let theta_lo = arms.lo[axis];
            let theta_hi = arms.hi[axis];
            for theta in [theta_lo, theta_hi] {
                if theta < min_fraction {
                    return Err(CoreError::DegenerateCutCell {
                        node: k,
                        fraction: as_f64(theta),
                    });
                }
                if theta < T::one() {
                    symmetric = false;
                }
            }
            let hl = theta_lo * h;
            let hh = theta_hi * h;
            diag[k] += two / (hl * hh);
            if let Some(m) = grid.neighbor(k, axis, -1) {
                cols.push(m as u32);
                coeffs.push(-two / (hl * (hl + hh)));
            }
            if let Some(m) = grid.neighbor(k, axis, 1) {
                cols.push(m as u32);
                coeffs.push(-two / (hh * (hl + hh)));
            }
        }
        row_ptr.push(cols.len() as u32);
    }

    Ok(LaplacianOperator { grid: Arc::clone(grid), diag, row_ptr, cols, coeffs, symmetric })
}

impl<T: Real> LaplacianOperator<T> {
    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[T] {
        &self.diag
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[T], y: &mut [T]) {
        self.apply_shifted(None, x, y);
    }

    /// `y = (A + diag(shift)) x`.
    pub fn apply_shifted(&self, shift: Option<&[T]>, x: &[T], y: &mut [T]) {
        for k in 0..self.n() {
            let mut acc = self.diag[k] * x[k];
            let lo = self.row_ptr[k] as usize;
            let hi = self.row_ptr[k + 1] as usize;
            for e in lo..hi {
                acc += self.coeffs[e] * x[self.cols[e] as usize];
            }
            if let Some(s) = shift {
                acc += s[k] * x[k];
            }
            y[k] = acc;
        }
    }

    /// Applies the operator to a field.
    pub fn apply_field(&self, x: &ScalarField<T>) -> Result<ScalarField<T>> {
        if x.len() != self.n() {
            return Err(CoreError::GridMismatch);
        }
        let mut y = vec![T::zero(); self.n()];
        self.apply(x.values(), &mut y);
        ScalarField::from_values(&self.grid, y)
    }
}
