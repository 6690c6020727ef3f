//! Domains, directions, and the reflection vocabulary: hyperplanes
//! `x·nu = lambda`, the reflection map, the support value `a(nu)` and the
//! largest admissible reflection level `lambda1(nu)`.
//!
//! Supported domains are an interval, an axis-aligned rectangle, and a disk.
//! All three are convex and symmetric with respect to every coordinate
//! hyperplane through their center, which is exactly what the reflection
//! sweeps require.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::scalar::{real, unit_tol, Real};

/// Shape of the computational domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum DomainSpec<T: Real> {
    Interval { x_lo: T, x_hi: T },
    Rectangle { x_lo: T, x_hi: T, y_lo: T, y_hi: T },
    Disk { center: [T; 2], radius: T },
}

impl<T: Real> DomainSpec<T> {
    pub fn interval(x_lo: T, x_hi: T) -> Self {
        DomainSpec::Interval { x_lo, x_hi }
    }

    pub fn rectangle(x_lo: T, x_hi: T, y_lo: T, y_hi: T) -> Self {
        DomainSpec::Rectangle { x_lo, x_hi, y_lo, y_hi }
    }

    pub fn disk(center: [T; 2], radius: T) -> Self {
        DomainSpec::Disk { center, radius }
    }

    /// Checks that all extents are strictly positive.
    pub fn validate(&self) -> Result<()> {
        match *self {
            DomainSpec::Interval { x_lo, x_hi } => {
                if x_hi <= x_lo {
                    return Err(CoreError::InvalidDomain(format!(
                        "interval extent must be positive ({x_lo}, {x_hi})"
                    )));
                }
            }
            DomainSpec::Rectangle { x_lo, x_hi, y_lo, y_hi } => {
                if x_hi <= x_lo || y_hi <= y_lo {
                    return Err(CoreError::InvalidDomain(format!(
                        "rectangle extents must be positive ({x_lo},{x_hi})x({y_lo},{y_hi})"
                    )));
                }
            }
            DomainSpec::Disk { radius, .. } => {
                if radius <= T::zero() {
                    return Err(CoreError::InvalidDomain(format!(
                        "disk radius must be positive, got {radius}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Spatial dimension (1 for intervals, 2 otherwise).
    pub fn dim(&self) -> usize {
        match self {
            DomainSpec::Interval { .. } => 1,
            _ => 2,
        }
    }

    pub fn center(&self) -> [T; 2] {
        let half = real::<T>(0.5);
        match *self {
            DomainSpec::Interval { x_lo, x_hi } => [(x_lo + x_hi) * half, T::zero()],
            DomainSpec::Rectangle { x_lo, x_hi, y_lo, y_hi } => {
                [(x_lo + x_hi) * half, (y_lo + y_hi) * half]
            }
            DomainSpec::Disk { center, .. } => center,
        }
    }

    /// Extent along a coordinate axis.
    pub fn extent(&self, axis: usize) -> T {
        match *self {
            DomainSpec::Interval { x_lo, x_hi } => {
                if axis == 0 {
                    x_hi - x_lo
                } else {
                    T::zero()
                }
            }
            DomainSpec::Rectangle { x_lo, x_hi, y_lo, y_hi } => {
                if axis == 0 {
                    x_hi - x_lo
                } else {
                    y_hi - y_lo
                }
            }
            DomainSpec::Disk { radius, .. } => radius + radius,
        }
    }

    /// Signed distance to the boundary: negative inside, positive outside.
    ///
    /// For the rectangle this is the (exact) max of the per-side signed
    /// distances, which suffices for containment and collar logic.
    pub fn signed_distance(&self, p: [T; 2]) -> T {
        match *self {
            DomainSpec::Interval { x_lo, x_hi } => (x_lo - p[0]).max(p[0] - x_hi),
            DomainSpec::Rectangle { x_lo, x_hi, y_lo, y_hi } => (x_lo - p[0])
                .max(p[0] - x_hi)
                .max(y_lo - p[1])
                .max(p[1] - y_hi),
            DomainSpec::Disk { center, radius } => {
                (p[0] - center[0]).hypot(p[1] - center[1]) - radius
            }
        }
    }

    /// Membership in the closed domain up to `band`.
    pub fn contains_closed(&self, p: [T; 2], band: T) -> bool {
        self.signed_distance(p) <= band
    }

    /// Infimum of `x·nu` over the domain, computed analytically from the
    /// shape (corner support for boxes, center offset minus radius for the
    /// disk).
    pub fn a_of_nu(&self, nu: Direction<T>) -> T {
        let [nx, ny] = nu.components();
        match *self {
            DomainSpec::Interval { x_lo, x_hi } => (x_lo * nx).min(x_hi * nx),
            DomainSpec::Rectangle { x_lo, x_hi, y_lo, y_hi } => {
                let mut best = T::infinity();
                for &cx in &[x_lo, x_hi] {
                    for &cy in &[y_lo, y_hi] {
                        best = best.min(cx * nx + cy * ny);
                    }
                }
                best
            }
            DomainSpec::Disk { center, radius } => center[0] * nx + center[1] * ny - radius,
        }
    }

    /// Supremum of `x·nu` over the domain.
    pub fn support(&self, nu: Direction<T>) -> T {
        -self.a_of_nu(nu.opposite())
    }

    /// Whether `nu` is a symmetry axis of the shape (always true for disks).
    pub fn is_symmetry_axis(&self, nu: Direction<T>) -> bool {
        let [nx, ny] = nu.components();
        let tol = unit_tol::<T>();
        match self {
            DomainSpec::Disk { .. } => true,
            DomainSpec::Interval { .. } => (nx.abs() - T::one()).abs() <= tol,
            DomainSpec::Rectangle { .. } => {
                (nx.abs() - T::one()).abs() <= tol || (ny.abs() - T::one()).abs() <= tol
            }
        }
    }

    /// Uniform samples of the boundary (corners included for boxes); used by
    /// the bisection fallback of [`lambda1_of_nu`].
    pub fn boundary_samples(&self, count: usize) -> Vec<[T; 2]> {
        let mut out = Vec::with_capacity(count);
        match *self {
            DomainSpec::Interval { x_lo, x_hi } => {
                out.push([x_lo, T::zero()]);
                out.push([x_hi, T::zero()]);
            }
            DomainSpec::Rectangle { x_lo, x_hi, y_lo, y_hi } => {
                let per_edge = (count / 4).max(2);
                for k in 0..=per_edge {
                    let t = real::<T>(k as f64 / per_edge as f64);
                    let x = x_lo + (x_hi - x_lo) * t;
                    let y = y_lo + (y_hi - y_lo) * t;
                    out.push([x, y_lo]);
                    out.push([x, y_hi]);
                    out.push([x_lo, y]);
                    out.push([x_hi, y]);
                }
            }
            DomainSpec::Disk { center, radius } => {
                for k in 0..count.max(8) {
                    let theta = real::<T>(2.0 * std::f64::consts::PI * k as f64 / count as f64);
                    out.push([
                        center[0] + radius * theta.cos(),
                        center[1] + radius * theta.sin(),
                    ]);
                }
            }
        }
        out
    }
}

/// Unit direction in the plane (1D directions use a zero second component).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction<T: Real>([T; 2]);

impl<T: Real> Direction<T> {
    /// Wraps a vector that must already have unit Euclidean norm.
    pub fn new(v: [T; 2]) -> Result<Self> {
        let norm = v[0].hypot(v[1]);
        let dev = (norm - T::one()).abs();
        if dev > unit_tol::<T>() {
            return Err(CoreError::InvalidDirection {
                deviation: crate::scalar::as_f64(dev),
            });
        }
        Ok(Direction(v))
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn unit(x: T, y: T) -> Result<Self> {
        let norm = x.hypot(y);
        if norm <= T::zero() {
            return Err(CoreError::InvalidDirection { deviation: 1.0 });
        }
        Ok(Direction([x / norm, y / norm]))
    }

    /// Coordinate axis direction (`axis` 0 or 1).
    pub fn axis(axis: usize) -> Self {
        if axis == 0 {
            Direction([T::one(), T::zero()])
        } else {
            Direction([T::zero(), T::one()])
        }
    }

    pub fn components(&self) -> [T; 2] {
        self.0
    }

    pub fn opposite(&self) -> Self {
        Direction([-self.0[0], -self.0[1]])
    }

    pub fn dot(&self, p: [T; 2]) -> T {
        self.0[0] * p[0] + self.0[1] * p[1]
    }

    /// If the direction is (anti-)parallel to a coordinate axis, returns
    /// `(axis, sign)`.
    pub fn as_axis(&self) -> Option<(usize, T)> {
        let tol = unit_tol::<T>();
        if (self.0[0].abs() - T::one()).abs() <= tol {
            Some((0, self.0[0].signum()))
        } else if (self.0[1].abs() - T::one()).abs() <= tol {
            Some((1, self.0[1].signum()))
        } else {
            None
        }
    }
}

/// Reflection of `x` through the hyperplane `{p : p·nu = lambda}`:
/// `x + 2 (lambda - x·nu) nu`. Applying it twice is the identity.
#[inline]
pub fn reflect_point<T: Real>(x: [T; 2], nu: Direction<T>, lambda: T) -> [T; 2] {
    let [nx, ny] = nu.components();
    let shift = (lambda - nu.dot(x)) * real::<T>(2.0);
    [x[0] + shift * nx, x[1] + shift * ny]
}

/// Largest level `lambda1(nu)` such that the reflected part of every cap
/// `{x·nu < t}` with `t <= lambda1` stays inside the closed domain.
///
/// For directions aligned with a symmetry axis (any direction on a disk) the
/// value is exactly `center·nu`; otherwise it is found by bisection on the
/// containment predicate sampled on the boundary.
pub fn lambda1_of_nu<T: Real>(spec: &DomainSpec<T>, nu: Direction<T>) -> T {
    if spec.is_symmetry_axis(nu) {
        return nu.dot(spec.center());
    }
    let samples = spec.boundary_samples(256);
    let scale = spec.extent(0).max(spec.extent(1)).max(T::one());
    let band = real::<T>(1e-12) * scale;
    let contained = |lambda: T| -> bool {
        samples
            .iter()
            .filter(|p| nu.dot(**p) < lambda)
            .all(|p| spec.contains_closed(reflect_point(*p, nu, lambda), band))
    };
    let mut lo = spec.a_of_nu(nu);
    let mut hi = spec.support(nu);
    if contained(hi) {
        return hi;
    }
    for _ in 0..100 {
        let mid = (lo + hi) * real::<T>(0.5);
        if contained(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}
