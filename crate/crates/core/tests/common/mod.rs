//! Shared test oracles: independent solvers for the symmetric two-point
//! boundary value problem `-v'' = g(v)`, `v(-L) = v(L) = 0`.
//!
//! Two independent routes are implemented and cross-checked:
//! - plain RK4 shooting on the initial value problem from the center, for
//!   bounded right-hand sides;
//! - bisection on the center value with the trajectory half-length
//!   evaluated through the first integral `v'^2/2 + G(v) = G(a)` (time-map
//!   quadrature), which handles the singular boundary approach exactly.

#![allow(dead_code)]

/// Right-hand side of the oracle problem: `(v + shift)^(-gamma) + c v^q`.
#[derive(Debug, Clone, Copy)]
pub struct OracleRhs {
    pub gamma: f64,
    /// Regularization shift `1/n`; zero for the singular problem.
    pub shift: f64,
    pub power_c: f64,
    pub power_q: f64,
}

impl OracleRhs {
    pub fn singular(gamma: f64) -> Self {
        OracleRhs { gamma, shift: 0.0, power_c: 0.0, power_q: 1.0 }
    }

    pub fn regularized(gamma: f64, n: u64) -> Self {
        OracleRhs { gamma, shift: 1.0 / n as f64, power_c: 0.0, power_q: 1.0 }
    }

    pub fn with_power(mut self, c: f64, q: f64) -> Self {
        self.power_c = c;
        self.power_q = q;
        self
    }

    pub fn g(&self, v: f64) -> f64 {
        (v + self.shift).powf(-self.gamma) + self.power_c * v.powf(self.power_q)
    }

    /// Antiderivative of `g` (up to a constant); differences are what the
    /// time map uses, so the logarithmic branch for gamma = 1 is fine.
    pub fn antiderivative(&self, v: f64) -> f64 {
        let s = v + self.shift;
        let base = if (self.gamma - 1.0).abs() < 1e-14 {
            s.ln()
        } else {
            s.powf(1.0 - self.gamma) / (1.0 - self.gamma)
        };
        base + self.power_c * v.powf(self.power_q + 1.0) / (self.power_q + 1.0)
    }
}

/// Half-length of the trajectory with center value `a`:
/// `T(a) = integral_0^a dv / sqrt(2 (G(a) - G(v)))`, evaluated after the
/// substitution `v = a - s^2` that removes the square-root singularity at
/// the center.
pub fn time_map(rhs: &OracleRhs, a: f64) -> f64 {
    let g_a = rhs.antiderivative(a);
    let integrand = |s: f64| -> f64 {
        if s == 0.0 {
            return (2.0 / rhs.g(a)).sqrt();
        }
        let v = a - s * s;
        if v <= 0.0 && rhs.shift == 0.0 && rhs.gamma >= 1.0 {
            return 0.0;
        }
        let v = v.max(0.0);
        let depth = g_a - rhs.antiderivative(v);
        if depth <= 0.0 {
            return 0.0;
        }
        2.0 * s / (2.0 * depth).sqrt()
    };
    adaptive_simpson(&integrand, 0.0, a.sqrt(), 1e-12, 48)
}

/// Center value of the symmetric solution on `(-half_length, half_length)`
/// by bisection on the time map.
pub fn time_map_center_value(rhs: &OracleRhs, half_length: f64) -> f64 {
    let mut lo = 1e-4;
    let mut hi = 1.0;
    // bracket: T is increasing in the center value for these right-hand sides
    while time_map(rhs, hi) < half_length {
        hi *= 2.0;
        assert!(hi < 1e6, "failed to bracket the center value");
    }
    while time_map(rhs, lo) > half_length {
        lo *= 0.5;
        assert!(lo > 1e-12, "failed to bracket the center value");
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if time_map(rhs, mid) < half_length {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// RK4 shooting for bounded right-hand sides: integrate the IVP
/// `v'' = -g(v)` from `(a, 0)` at the center and bisect `a` on the boundary
/// value at `x = half_length`.
pub fn rk4_shooting_center_value(rhs: &OracleRhs, half_length: f64, steps: usize) -> f64 {
    assert!(rhs.shift > 0.0, "plain shooting needs a bounded right-hand side");
    let boundary_value = |a: f64| -> f64 {
        let mut v = a;
        let mut p = 0.0;
        let dx = half_length / steps as f64;
        let guard = -0.5 * rhs.shift; // keep the argument of g positive
        let f = |v: f64, p: f64| -> (f64, f64) { (p, -rhs.g(v.max(guard))) };
        for _ in 0..steps {
            let (k1v, k1p) = f(v, p);
            let (k2v, k2p) = f(v + 0.5 * dx * k1v, p + 0.5 * dx * k1p);
            let (k3v, k3p) = f(v + 0.5 * dx * k2v, p + 0.5 * dx * k2p);
            let (k4v, k4p) = f(v + dx * k3v, p + dx * k3p);
            v += dx / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            p += dx / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        }
        v
    };
    let mut lo = 1e-4;
    let mut hi = 4.0;
    while boundary_value(hi) < 0.0 {
        hi *= 2.0;
        assert!(hi < 1e6);
    }
    while boundary_value(lo) > 0.0 {
        lo *= 0.5;
        assert!(lo > 1e-12);
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if boundary_value(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: usize) -> f64 {
    let c = 0.5 * (a + b);
    let fa = f(a);
    let fb = f(b);
    let fc = f(c);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fc + fb);
    simpson_recurse(f, a, b, fa, fb, fc, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_recurse(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    fc: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> f64 {
    let c = 0.5 * (a + b);
    let d = 0.5 * (a + c);
    let e = 0.5 * (c + b);
    let fd = f(d);
    let fe = f(e);
    let left = (c - a) / 6.0 * (fa + 4.0 * fd + fc);
    let right = (b - c) / 6.0 * (fc + 4.0 * fe + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_recurse(f, a, c, fa, fc, fd, left, tol * 0.5, depth - 1)
            + simpson_recurse(f, c, b, fc, fb, fe, right, tol * 0.5, depth - 1)
    }
}
