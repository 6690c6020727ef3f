//! Cap sections `{x in Omega : x·nu < lambda}` together with precomputed
//! interpolation stencils for evaluating a field at the reflected points.
//!
//! Reflected points that land exactly on a lattice node use direct lookup;
//! off-grid points use bilinear interpolation, with corners outside the
//! interior node set treated as the zero boundary value (fields vanish on
//! the boundary and extend continuously by zero).

use std::sync::Arc;

use crate::error::{CoreError, Result};
use crate::geometry::{reflect_point, Direction};
use crate::grid::Grid;
use crate::scalar::{as_f64, real, Real};

/// How to evaluate a field at one reflected point.
#[derive(Debug, Clone)]
pub enum ReflectTarget<T> {
    /// The reflected point coincides with an interior node.
    Node(u32),
    /// Bilinear stencil; `None` corners carry the boundary value 0.
    Interp {
        nodes: [Option<u32>; 4],
        weights: [T; 4],
    },
    /// The reflected point lies outside the closed domain.
    Outside,
}

/// A cap together with reflection stencils for each of its nodes.
#[derive(Debug)]
pub struct CapSection<T: Real> {
    grid: Arc<Grid<T>>,
    pub nu: Direction<T>,
    pub lambda: T,
    pub node_indices: Vec<usize>,
    pub targets: Vec<ReflectTarget<T>>,
}

impl<T: Real> CapSection<T> {
    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.node_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_indices.is_empty()
    }
}

/// Builds the cap `{x·nu < lambda}` over the interior nodes and the
/// reflection stencils onto `x + 2(lambda - x·nu) nu`.
pub fn cap_section<T: Real>(
    grid: &Arc<Grid<T>>,
    nu: Direction<T>,
    lambda: T,
) -> Result<CapSection<T>> {
    let mut node_indices = Vec::new();
    for k in 0..grid.node_count() {
        if nu.dot(grid.coords(k)) < lambda {
            node_indices.push(k);
        }
    }
    if node_indices.is_empty() {
        return Err(CoreError::EmptyCap {
            lambda: as_f64(lambda),
        });
    }
    let targets = reflect_targets(grid, &node_indices, nu, lambda);
    Ok(CapSection {
        grid: Arc::clone(grid),
        nu,
        lambda,
        node_indices,
        targets,
    })
}

/// Builds reflection stencils for an arbitrary node subset.
pub fn reflect_targets<T: Real>(
    grid: &Grid<T>,
    nodes: &[usize],
    nu: Direction<T>,
    lambda: T,
) -> Vec<ReflectTarget<T>> {
    nodes
        .iter()
        .map(|&k| target_for_point(grid, reflect_point(grid.coords(k), nu, lambda)))
        .collect()
}

/// Interpolation stencil for an arbitrary point (exact node, bilinear
/// stencil with zero-extended boundary corners, or outside the closure).
pub fn interpolation_target<T: Real>(grid: &Grid<T>, p: [T; 2]) -> ReflectTarget<T> {
    target_for_point(grid, p)
}

fn target_for_point<T: Real>(grid: &Grid<T>, p: [T; 2]) -> ReflectTarget<T> {
    let h = grid.h();
    let origin = grid.origin();
    let band = h * real::<T>(1e-12);
    let snap = real::<T>(1e-9);

    let s = [
        ((p[0] - origin[0]) / h, 0_usize),
        ((p[1] - origin[1]) / h, 1_usize),
    ];
    let rounded = [s[0].0.round(), s[1].0.round()];
    let on_lattice = (s[0].0 - rounded[0]).abs() <= snap
        && (grid.dim() == 1 || (s[1].0 - rounded[1]).abs() <= snap);

    if on_lattice {
        let i = as_f64(rounded[0]).round() as i64;
        let j = if grid.dim() == 1 {
            0
        } else {
            as_f64(rounded[1]).round() as i64
        };
        if let Some(idx) = grid.index_of(i, j) {
            return ReflectTarget::Node(idx as u32);
        }
        // Lattice point on or just outside the boundary: value 0 if the
        // reflected point is still in the closed domain.
        return if grid.spec().contains_closed(p, band) {
            ReflectTarget::Interp {
                nodes: [None, None, None, None],
                weights: [T::one(), T::zero(), T::zero(), T::zero()],
            }
        } else {
            ReflectTarget::Outside
        };
    }

    if !grid.spec().contains_closed(p, band) {
        return ReflectTarget::Outside;
    }

    let base_i = s[0].0.floor();
    let fi = (s[0].0 - base_i).max(T::zero()).min(T::one());
    let bi = as_f64(base_i) as i64;

    if grid.dim() == 1 {
        let corner = |i: i64| grid.index_of(i, 0).map(|k| k as u32);
        return ReflectTarget::Interp {
            nodes: [corner(bi), corner(bi + 1), None, None],
            weights: [T::one() - fi, fi, T::zero(), T::zero()],
        };
    }

    let base_j = s[1].0.floor();
    let fj = (s[1].0 - base_j).max(T::zero()).min(T::one());
    let bj = as_f64(base_j) as i64;
    let corner = |i: i64, j: i64| grid.index_of(i, j).map(|k| k as u32);
    ReflectTarget::Interp {
        nodes: [
            corner(bi, bj),
            corner(bi + 1, bj),
            corner(bi, bj + 1),
            corner(bi + 1, bj + 1),
        ],
        weights: [
            (T::one() - fi) * (T::one() - fj),
            fi * (T::one() - fj),
            (T::one() - fi) * fj,
            fi * fj,
        ],
    }
}

/// Evaluates a target against nodal values (boundary corners contribute 0).
pub fn eval_target<T: Real>(values: &[T], target: &ReflectTarget<T>) -> Result<T> {
    match target {
        ReflectTarget::Node(k) => Ok(values[*k as usize]),
        ReflectTarget::Interp { nodes, weights } => {
            let mut acc = T::zero();
            for (n, w) in nodes.iter().zip(weights.iter()) {
                if let Some(k) = n {
                    acc = acc + *w * values[*k as usize];
                }
            }
            Ok(acc)
        }
        ReflectTarget::Outside => Err(CoreError::CapOutsideDomain),
    }
}
