//! Uniform Cartesian discretization of a domain with a mask for curved
//! boundaries.
//!
//! Interior nodes carry integer lattice coordinates; nodes adjacent to the
//! boundary store the fractional arm lengths to the boundary along each axis
//! so the operator assembly can use shortened (Shortley–Weller) stencils.
//! Grids are rejected, not repaired, when the requested spacing would break
//! reflection symmetry: asymmetric discretizations would confound every
//! symmetry check downstream.

use crate::error::{CoreError, Result};
use crate::geometry::{Direction, DomainSpec};
use crate::scalar::{as_f64, real, Real};

const NONE: u32 = u32::MAX;

/// Fractional arm lengths from a node towards its lattice neighbors, per
/// axis and side. An arm of 1 means the neighbor is an interior node; a
/// value in (0, 1) means the boundary cuts the arm at that fraction.
#[derive(Debug, Clone, Copy)]
pub struct Arms<T> {
    pub lo: [T; 2],
    pub hi: [T; 2],
}

/// Masked uniform grid over a [`DomainSpec`].
#[derive(Debug)]
pub struct Grid<T: Real> {
    spec: DomainSpec<T>,
    h: T,
    dim: usize,
    origin: [T; 2],
    win_lo: [i64; 2],
    win_hi: [i64; 2],
    /// Lattice steps spanned by the domain along each axis (boxes only).
    extent_steps: [i64; 2],
    nodes: Vec<[i64; 2]>,
    coords: Vec<[T; 2]>,
    lookup: Vec<u32>,
    arms: Vec<Arms<T>>,
}

/// Builds the interior grid for `spec` at spacing `h`.
///
/// Node ordering is lexicographic by integer lattice index. Fails with
/// `AsymmetricGrid` when `h` does not divide a box extent (the node set
/// would not be closed under the domain's reflections) and with
/// `SpacingTooCoarse` when fewer than 7 interior nodes fit along an axis.
pub fn build_grid<T: Real>(spec: &DomainSpec<T>, h: T) -> Result<Grid<T>> {
    spec.validate()?;
    if h <= T::zero() {
        return Err(CoreError::NonPositiveSpacing(as_f64(h)));
    }
    let dim = spec.dim();

    let mut extent_steps = [0_i64; 2];
    let (origin, win_lo, win_hi) = match *spec {
        DomainSpec::Interval { x_lo, x_hi } => {
            let m = steps_for_extent(x_hi - x_lo, h, 0)?;
            extent_steps[0] = m;
            ([x_lo, T::zero()], [1, 0], [m - 1, 0])
        }
        DomainSpec::Rectangle { x_lo, x_hi, y_lo, y_hi } => {
            let mx = steps_for_extent(x_hi - x_lo, h, 0)?;
            let my = steps_for_extent(y_hi - y_lo, h, 1)?;
            extent_steps = [mx, my];
            ([x_lo, y_lo], [1, 1], [mx - 1, my - 1])
        }
        DomainSpec::Disk { center, radius } => {
            let k = (as_f64(radius) / as_f64(h)).ceil() as i64 + 1;
            (center, [-k, -k], [k, k])
        }
    };

    let width = [win_hi[0] - win_lo[0] + 1, win_hi[1] - win_lo[1] + 1];
    let mut lookup = vec![NONE; (width[0] * width[1]) as usize];
    let mut nodes = Vec::new();
    let mut coords = Vec::new();

    let inside_band = -h * real::<T>(1e-12);
    for i in win_lo[0]..=win_hi[0] {
        for j in win_lo[1]..=win_hi[1] {
            let p = [
                origin[0] + real::<T>(i as f64) * h,
                origin[1] + real::<T>(j as f64) * h,
            ];
            let interior = match spec {
                // Box lattices are interior by index construction.
                DomainSpec::Interval { .. } | DomainSpec::Rectangle { .. } => true,
                DomainSpec::Disk { .. } => spec.signed_distance(p) < inside_band,
            };
            if interior {
                let slot = ((i - win_lo[0]) * width[1] + (j - win_lo[1])) as usize;
                lookup[slot] = nodes.len() as u32;
                nodes.push([i, j]);
                coords.push(p);
            }
        }
    }

    let mut grid = Grid {
        spec: *spec,
        h,
        dim,
        origin,
        win_lo,
        win_hi,
        extent_steps,
        nodes,
        coords,
        lookup,
        arms: Vec::new(),
    };

    grid.check_axis_counts()?;
    grid.check_reflection_closure()?;
    grid.arms = grid.compute_arms();
    Ok(grid)
}

fn steps_for_extent<T: Real>(extent: T, h: T, axis: usize) -> Result<i64> {
    let ratio = as_f64(extent) / as_f64(h);
    let m = ratio.round();
    if (ratio - m).abs() > 1e-9 * m.max(1.0) {
        return Err(CoreError::AsymmetricGrid(format!(
            "spacing {h} does not divide the extent {extent} along axis {axis}"
        )));
    }
    Ok(m as i64)
}

impl<T: Real> Grid<T> {
    pub fn spec(&self) -> &DomainSpec<T> {
        &self.spec
    }

    pub fn h(&self) -> T {
        self.h
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Cell measure `h^N` attached to each node.
    pub fn measure_per_node(&self) -> T {
        if self.dim == 1 {
            self.h
        } else {
            self.h * self.h
        }
    }

    pub fn lattice(&self, k: usize) -> [i64; 2] {
        self.nodes[k]
    }

    pub fn coords(&self, k: usize) -> [T; 2] {
        self.coords[k]
    }

    pub fn origin(&self) -> [T; 2] {
        self.origin
    }

    pub fn arms(&self, k: usize) -> Arms<T> {
        self.arms[k]
    }

    /// Index of the interior node at lattice position `(i, j)`, if any.
    pub fn index_of(&self, i: i64, j: i64) -> Option<usize> {
        if i < self.win_lo[0] || i > self.win_hi[0] || j < self.win_lo[1] || j > self.win_hi[1] {
            return None;
        }
        let width1 = self.win_hi[1] - self.win_lo[1] + 1;
        let slot = ((i - self.win_lo[0]) * width1 + (j - self.win_lo[1])) as usize;
        let v = self.lookup[slot];
        if v == NONE {
            None
        } else {
            Some(v as usize)
        }
    }

    /// Interior neighbor along `axis` in direction `side` (-1 or +1).
    pub fn neighbor(&self, k: usize, axis: usize, side: i64) -> Option<usize> {
        let mut ij = self.nodes[k];
        ij[axis] += side;
        self.index_of(ij[0], ij[1])
    }

    /// Analytic distance from a node to the domain boundary.
    pub fn boundary_distance(&self, k: usize) -> T {
        -self.spec.signed_distance(self.coords[k])
    }

    /// Permutation realizing the reflection through the center hyperplane
    /// orthogonal to coordinate `axis` (exact in index space).
    pub fn reflection_perm(&self, axis: usize) -> Result<Vec<u32>> {
        if axis >= self.dim {
            return Err(CoreError::AxisNotClosed);
        }
        let mut perm = vec![0_u32; self.node_count()];
        for (k, ij) in self.nodes.iter().enumerate() {
            let r = self.reflect_index(*ij, axis);
            match self.index_of(r[0], r[1]) {
                Some(m) => perm[k] = m as u32,
                None => return Err(CoreError::AxisNotClosed),
            }
        }
        Ok(perm)
    }

    fn reflect_index(&self, ij: [i64; 2], axis: usize) -> [i64; 2] {
        let mut out = ij;
        out[axis] = match self.spec {
            DomainSpec::Interval { .. } | DomainSpec::Rectangle { .. } => {
                self.extent_steps[axis] - ij[axis]
            }
            DomainSpec::Disk { .. } => -ij[axis],
        };
        out
    }

    fn check_axis_counts(&self) -> Result<()> {
        for axis in 0..self.dim {
            let mut best = 0_usize;
            // Longest run of interior nodes along any lattice line parallel
            // to this axis.
            let cross = 1 - axis;
            for c in self.win_lo[cross]..=self.win_hi[cross] {
                let mut count = 0_usize;
                for a in self.win_lo[axis]..=self.win_hi[axis] {
                    let (i, j) = if axis == 0 { (a, c) } else { (c, a) };
                    if self.index_of(i, j).is_some() {
                        count += 1;
                    }
                }
                best = best.max(count);
            }
            if best < 7 {
                return Err(CoreError::SpacingTooCoarse { axis, nodes: best });
            }
        }
        Ok(())
    }

    fn check_reflection_closure(&self) -> Result<()> {
        for axis in 0..self.dim {
            for ij in &self.nodes {
                let r = self.reflect_index(*ij, axis);
                if self.index_of(r[0], r[1]).is_none() {
                    return Err(CoreError::AsymmetricGrid(format!(
                        "node {ij:?} has no mirror along axis {axis}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn compute_arms(&self) -> Vec<Arms<T>> {
        let one = T::one();
        self.nodes
            .iter()
            .enumerate()
            .map(|(k, _)| {
                let mut arms = Arms { lo: [one, one], hi: [one, one] };
                for axis in 0..self.dim {
                    for (side, slot) in [(-1_i64, 0_usize), (1, 1)] {
                        if self.neighbor(k, axis, side).is_none() {
                            let theta = self.boundary_arm(k, axis, side);
                            if slot == 0 {
                                arms.lo[axis] = theta;
                            } else {
                                arms.hi[axis] = theta;
                            }
                        }
                    }
                }
                arms
            })
            .collect()
    }

    /// Fraction of `h` from node `k` to the boundary along `axis`/`side`.
    fn boundary_arm(&self, k: usize, axis: usize, side: i64) -> T {
        match self.spec {
            // Box boundaries coincide with lattice lines: the arm is whole.
            DomainSpec::Interval { .. } | DomainSpec::Rectangle { .. } => T::one(),
            DomainSpec::Disk { center, radius } => {
                let p = self.coords[k];
                let d_along = p[axis] - center[axis];
                let d_cross = p[1 - axis] - center[1 - axis];
                let half_chord = (radius * radius - d_cross * d_cross).max(T::zero()).sqrt();
                let dist = if side > 0 {
                    half_chord - d_along
                } else {
                    half_chord + d_along
                };
                (dist / self.h).min(T::one())
            }
        }
    }
}
