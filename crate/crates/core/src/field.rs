//! Nodal scalar fields over a grid. Boundary values are implicitly zero.

use std::sync::Arc;

use crate::error::{CoreError, Result};
use crate::grid::Grid;
use crate::scalar::Real;

/// One scalar per interior node of a shared grid.
#[derive(Debug, Clone)]
pub struct ScalarField<T: Real> {
    grid: Arc<Grid<T>>,
    values: Vec<T>,
}

impl<T: Real> ScalarField<T> {
    pub fn constant(grid: &Arc<Grid<T>>, value: T) -> Self {
        ScalarField {
            grid: Arc::clone(grid),
            values: vec![value; grid.node_count()],
        }
    }

    pub fn zeros(grid: &Arc<Grid<T>>) -> Self {
        Self::constant(grid, T::zero())
    }

    pub fn from_values(grid: &Arc<Grid<T>>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(CoreError::GridMismatch);
        }
        Ok(ScalarField { grid: Arc::clone(grid), values })
    }

    /// Fills from a function of the node coordinates.
    pub fn from_fn(grid: &Arc<Grid<T>>, f: impl Fn([T; 2]) -> T) -> Self {
        let values = (0..grid.node_count()).map(|k| f(grid.coords(k))).collect();
        ScalarField { grid: Arc::clone(grid), values }
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn get(&self, k: usize) -> T {
        self.values[k]
    }

    /// Whether another field lives on an equal grid (same object or same
    /// shape, spacing and node count).
    pub fn same_grid(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid)
            || (self.grid.spec() == other.grid.spec()
                && self.grid.h() == other.grid.h()
                && self.len() == other.len())
    }

    pub fn sup_norm(&self) -> T {
        self.values
            .iter()
            .fold(T::zero(), |acc, v| acc.max(v.abs()))
    }

    pub fn min_value(&self) -> T {
        self.values.iter().fold(T::infinity(), |acc, v| acc.min(*v))
    }

    pub fn max_value(&self) -> T {
        self.values
            .iter()
            .fold(T::neg_infinity(), |acc, v| acc.max(*v))
    }

    /// Nodewise difference `self - other`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        if !self.same_grid(other) {
            return Err(CoreError::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| *a - *b)
            .collect();
        Ok(ScalarField { grid: Arc::clone(&self.grid), values })
    }

    /// Nodewise sum `self + other`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if !self.same_grid(other) {
            return Err(CoreError::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| *a + *b)
            .collect();
        Ok(ScalarField { grid: Arc::clone(&self.grid), values })
    }

    /// Sup-norm of the difference against another field.
    pub fn sup_distance(&self, other: &Self) -> Result<T> {
        Ok(self.sub(other)?.sup_norm())
    }

    /// Index of the node closest to the domain center (ties resolved by the
    /// lowest node index).
    pub fn center_node(&self) -> usize {
        let c = self.grid.spec().center();
        let mut best = 0;
        let mut best_d = T::infinity();
        for k in 0..self.len() {
            let p = self.grid.coords(k);
            let d = (p[0] - c[0]).hypot(p[1] - c[1]);
            if d < best_d {
                best_d = d;
                best = k;
            }
        }
        best
    }
}
