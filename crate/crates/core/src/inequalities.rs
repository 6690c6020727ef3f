//! Scalar inequalities powering the comparison principles, checked by
//! seeded randomized sampling.
//!
//! The four-term function `g` is evaluated from the three base powers with
//! sign-compatible pairing, so the boundary case `(x, y, x, y)` cancels
//! exactly in floating point. Tolerances are relative to the largest term
//! magnitude: the terms reach 1e45 before cancellation at the extreme ends
//! of the sampled range, where absolute tolerances are meaningless.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::scalar::{real, Real};

/// Number of deterministic sampling shards; fixed so results do not depend
/// on how the shards are scheduled.
pub const SHARDS: u64 = 64;

/// A point of the constrained domain `0 <= x <= z`, `0 <= h <= y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadrupleSample<T> {
    pub x: T,
    pub y: T,
    pub z: T,
    pub h: T,
    pub gamma: T,
}

impl<T: Real> QuadrupleSample<T> {
    pub fn in_domain(&self) -> bool {
        T::zero() <= self.x && self.x <= self.z && T::zero() <= self.h && self.h <= self.y
    }
}

/// The four monomial terms of `g`: `x^g (x+y)^g (z+h)^g`,
/// `x^g z^g (z+h)^g`, `z^g (x+y)^g (z+h)^g`, `x^g z^g (x+y)^g`.
pub fn g_gamma_terms<T: Real>(s: &QuadrupleSample<T>) -> [T; 4] {
    let px = s.x.powf(s.gamma);
    let pxy = (s.x + s.y).powf(s.gamma);
    let pzh = (s.z + s.h).powf(s.gamma);
    let pz = s.z.powf(s.gamma);
    [px * pxy * pzh, px * pz * pzh, pz * pxy * pzh, px * pz * pxy]
}

/// `g(x, y, z, h) = t1 + t2 - t3 - t4`, grouped as `(t1 - t3) + (t2 - t4)`
/// so matching terms cancel exactly.
pub fn g_gamma<T: Real>(s: &QuadrupleSample<T>) -> T {
    let [t1, t2, t3, t4] = g_gamma_terms(s);
    (t1 - t3) + (t2 - t4)
}

/// Analytic partial derivative of `g` in `y`; non-positive on the domain
/// whenever `x <= z`.
pub fn g_gamma_dy<T: Real>(s: &QuadrupleSample<T>) -> T {
    let g = s.gamma;
    let px = s.x.powf(g);
    let pz = s.z.powf(g);
    let pxy1 = (s.x + s.y).powf(g - T::one());
    let pzh = (s.z + s.h).powf(g);
    g * px * pxy1 * pzh - g * pz * pxy1 * pzh - g * px * pz * pxy1
}

/// `g~(t) = x^(-g) - z^(-g) + (z+t)^(-g) - (x+t)^(-g)`; zero at `t = 0` and
/// non-decreasing for `0 < x <= z`.
pub fn g_tilde<T: Real>(t: T, x: T, z: T, gamma: T) -> Result<T> {
    if x <= T::zero() {
        return Err(CoreError::NonPositiveX(crate::scalar::as_f64(x)));
    }
    let g = -gamma;
    Ok((x.powf(g) - z.powf(g)) + ((z + t).powf(g) - (x + t).powf(g)))
}

/// Analytic derivative of `g~`: `gamma ((x+t)^(-g-1) - (z+t)^(-g-1))`.
pub fn g_tilde_derivative<T: Real>(t: T, x: T, z: T, gamma: T) -> T {
    let e = -gamma - T::one();
    gamma * ((x + t).powf(e) - (z + t).powf(e))
}

/// The reciprocal-power bracket
/// `u0l^(-g) - u0^(-g) + (u0+w)^(-g) - (u0l+wl)^(-g)`, non-positive when
/// `0 < u0 <= u0l` and `w >= wl >= 0`. This is `g / (x^g z^g (x+y)^g (z+h)^g)`
/// under the substitution `x=u0, y=w, z=u0l, h=wl`.
pub fn bracket<T: Real>(u0: T, w: T, u0l: T, wl: T, gamma: T) -> T {
    let g = -gamma;
    (u0l.powf(g) - u0.powf(g)) + ((u0 + w).powf(g) - (u0l + wl).powf(g))
}

/// Worst case found by a randomized check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckOutcome<T> {
    pub pass: bool,
    pub samples: usize,
    /// Worst violation relative to the local term scale.
    pub worst_scaled: T,
    pub worst_point: Option<QuadrupleSample<T>>,
}

fn shard_seed(master: u64, shard: u64) -> u64 {
    // splitmix-style spreading keeps shard streams decorrelated
    let mut s = master.wrapping_add(shard.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    s ^= s >> 30;
    s = s.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    s ^= s >> 27;
    s
}

fn log_uniform<T: Real>(rng: &mut ChaCha8Rng) -> T {
    // log-uniform over [1e-3, 1e3]: the hard regimes are extreme ratios
    let e: f64 = rng.gen_range(-3.0..3.0);
    real(10f64.powf(e))
}

fn sample_domain<T: Real>(rng: &mut ChaCha8Rng, gamma: T) -> QuadrupleSample<T> {
    let a: T = log_uniform(rng);
    let b: T = log_uniform(rng);
    let c: T = log_uniform(rng);
    let d: T = log_uniform(rng);
    QuadrupleSample {
        x: a.min(b),
        z: a.max(b),
        h: c.min(d),
        y: c.max(d),
        gamma,
    }
}

fn run_check<T: Real>(
    gammas: &[T],
    sample_count: usize,
    seed: u64,
    tol_rel: T,
    eval: impl Fn(&QuadrupleSample<T>) -> (T, T),
) -> CheckOutcome<T> {
    let per_shard = sample_count / SHARDS as usize + 1;
    let mut worst_scaled = T::neg_infinity();
    let mut worst_point = None;
    let mut total = 0;
    for &gamma in gammas {
        for shard in 0..SHARDS {
            let mut rng = ChaCha8Rng::seed_from_u64(shard_seed(seed, shard));
            for _ in 0..per_shard {
                let s = sample_domain(&mut rng, gamma);
                let (violation, scale) = eval(&s);
                let scaled = violation / scale.max(real(1e-300));
                if scaled > worst_scaled {
                    worst_scaled = scaled;
                    worst_point = Some(s);
                }
                total += 1;
            }
        }
    }
    CheckOutcome {
        pass: worst_scaled <= tol_rel,
        samples: total,
        worst_scaled,
        worst_point,
    }
}

/// Checks `g <= 0` on the constrained domain: every sample must satisfy
/// `g <= 1e-12 * scale` with `scale` the largest term magnitude.
pub fn check_g_nonpositive<T: Real>(
    gammas: &[T],
    sample_count: usize,
    seed: u64,
) -> CheckOutcome<T> {
    run_check(gammas, sample_count, seed, real(1e-12), |s| {
        let terms = g_gamma_terms(s);
        let scale = terms.iter().fold(T::zero(), |m, t| m.max(t.abs()));
        (g_gamma(s), scale)
    })
}

/// Checks the factored form of `g(x, y, z, y)`:
/// `-(x^(-g) - z^(-g) + (z+y)^(-g) - (x+y)^(-g)) x^g z^g (z+y)^g (x+y)^g`
/// agrees with the four-term evaluation to 1e-10 of the term scale.
pub fn check_factorization_identity<T: Real>(
    gammas: &[T],
    sample_count: usize,
    seed: u64,
) -> CheckOutcome<T> {
    run_check(gammas, sample_count, seed, real(1e-10), |s0| {
        let s = QuadrupleSample { h: s0.y, ..*s0 };
        let lhs = g_gamma(&s);
        let g = s.gamma;
        let tilde = g_tilde(s.y, s.x, s.z, g).unwrap_or_else(|_| T::nan());
        let product = s.x.powf(g) * s.z.powf(g) * (s.z + s.y).powf(g) * (s.x + s.y).powf(g);
        let rhs = -tilde * product;
        let terms = g_gamma_terms(&s);
        let scale = terms.iter().fold(T::zero(), |m, t| m.max(t.abs()));
        ((lhs - rhs).abs(), scale)
    })
}

/// Checks that `g~` is non-decreasing: no adjacent difference on a sampled
/// `t`-grid may fall below `-1e-12` of the dominant term `x^(-gamma)`, and
/// the analytic derivative must be non-negative.
pub fn check_g_tilde_monotone<T: Real>(
    gammas: &[T],
    sample_count: usize,
    seed: u64,
) -> CheckOutcome<T> {
    run_check(gammas, sample_count / 16, seed, real(1e-12), |s| {
        let (x, z, gamma) = (s.x, s.z, s.gamma);
        let scale = x.powf(-gamma);
        let mut worst = T::neg_infinity();
        let mut prev = g_tilde(T::zero(), x, z, gamma).unwrap();
        // geometric t-grid covering well below x and well above z
        for k in 0..16 {
            let t = x * real::<T>(1e-2) * real::<T>(2.3_f64.powi(k));
            let value = g_tilde(t, x, z, gamma).unwrap();
            worst = worst.max(prev - value); // positive when decreasing
            worst = worst.max(-g_tilde_derivative(t, x, z, gamma) * t);
            prev = value;
        }
        (worst, scale)
    })
}

/// Checks the bracket against zero on admissible samples
/// (`0 < u0 <= u0l`, `w >= wl >= 0`).
pub fn check_bracket_nonpositive<T: Real>(
    gammas: &[T],
    sample_count: usize,
    seed: u64,
) -> CheckOutcome<T> {
    run_check(gammas, sample_count, seed, real(1e-12), |s| {
        let value = bracket(s.x, s.y, s.z, s.h, s.gamma);
        let g = -s.gamma;
        let scale = s
            .z
            .powf(g)
            .max(s.x.powf(g))
            .max((s.x + s.y).powf(g))
            .max((s.z + s.h).powf(g));
        (value, scale)
    })
}
