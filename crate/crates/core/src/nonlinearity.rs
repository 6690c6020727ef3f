//! The right-hand side of the problem: the singular term `s^(-gamma)`, its
//! regularization `(s + 1/n)^(-gamma)`, and the lower-order term `f` drawn
//! from a closed catalog (zero, power, linear, tabulated monotone).
//!
//! The hypothesis checked by [`check_hp`] is: f locally Lipschitz,
//! non-decreasing, positive on positive arguments, non-negative at zero.
//! `f = zero` fails the strict positivity part but is accepted by the
//! solvers because the purely singular profile is exactly that case; the
//! verification harness records the status instead.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::scalar::{as_f64, real, Real};

/// Catalog of lower-order terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FKind<T: Real> {
    Zero,
    Power { q: T, c: T },
    Linear { m: T, b: T },
    Tabulated { points: Vec<(T, T)> },
}

/// Validation status of the monotone-positive hypothesis on `f`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HpStatus {
    #[default]
    Unchecked,
    Satisfied,
    Violated(String),
}

/// Exponent `gamma` plus the lower-order term `f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonlinearitySpec<T: Real> {
    pub gamma: T,
    pub f: FKind<T>,
    #[serde(skip, default)]
    pub hp_status: HpStatus,
}

impl<T: Real> NonlinearitySpec<T> {
    /// Validates gamma and the catalog parameters. Tabulated abscissae must
    /// be strictly increasing; ordinate monotonicity is not enforced here —
    /// it is what [`check_hp`] reports on.
    pub fn new(gamma: T, f: FKind<T>) -> Result<Self> {
        if gamma <= T::zero() {
            return Err(CoreError::InvalidInput(format!(
                "gamma must be positive, got {gamma}"
            )));
        }
        match &f {
            FKind::Zero => {}
            FKind::Power { q, c } => {
                if *q <= T::zero() || *c < T::zero() {
                    return Err(CoreError::InvalidInput(format!(
                        "power term needs q > 0 and c >= 0, got q={q}, c={c}"
                    )));
                }
            }
            FKind::Linear { m, b } => {
                if *m < T::zero() || *b < T::zero() {
                    return Err(CoreError::InvalidInput(format!(
                        "linear term needs m >= 0 and b >= 0, got m={m}, b={b}"
                    )));
                }
            }
            FKind::Tabulated { points } => {
                if points.len() < 2 {
                    return Err(CoreError::InvalidInput(
                        "tabulated term needs at least two breakpoints".into(),
                    ));
                }
                for w in points.windows(2) {
                    if w[1].0 <= w[0].0 {
                        return Err(CoreError::InvalidInput(
                            "tabulated abscissae must be strictly increasing".into(),
                        ));
                    }
                }
            }
        }
        Ok(NonlinearitySpec { gamma, f, hp_status: HpStatus::Unchecked })
    }

    pub fn zero_f(gamma: T) -> Result<Self> {
        Self::new(gamma, FKind::Zero)
    }

    pub fn is_zero_f(&self) -> bool {
        matches!(self.f, FKind::Zero)
    }

    /// Runs [`check_hp`] and stores the verdict.
    pub fn validated(mut self, s_max: T, samples: usize) -> Self {
        let report = check_hp(&self, s_max, samples);
        self.hp_status = report.status();
        self
    }
}

/// `s^(-gamma)`; the argument must be strictly positive.
pub fn eval_singular<T: Real>(s: T, spec: &NonlinearitySpec<T>) -> Result<T> {
    if s <= T::zero() {
        return Err(CoreError::NonPositiveArgument(as_f64(s)));
    }
    Ok(s.powf(-spec.gamma))
}

/// `(s + 1/n)^(-gamma)` for stage `n >= 1`; bounded by `n^gamma`.
pub fn eval_regularized<T: Real>(s: T, n: u64, spec: &NonlinearitySpec<T>) -> Result<T> {
    assert!(n >= 1, "regularization stage must be at least 1");
    if s < T::zero() {
        return Err(CoreError::NegativeArgument(as_f64(s)));
    }
    let shift = real::<T>(1.0 / n as f64);
    Ok((s + shift).powf(-spec.gamma))
}

/// Value of the lower-order term at `s >= 0`.
pub fn eval_f<T: Real>(s: T, spec: &NonlinearitySpec<T>) -> T {
    match &spec.f {
        FKind::Zero => T::zero(),
        FKind::Power { q, c } => *c * s.powf(*q),
        FKind::Linear { m, b } => *m * s + *b,
        FKind::Tabulated { points } => {
            let (lo, hi) = bracket(points, s);
            if lo == hi {
                points[lo].1
            } else {
                let (x0, y0) = points[lo];
                let (x1, y1) = points[hi];
                y0 + (y1 - y0) * (s - x0) / (x1 - x0)
            }
        }
    }
}

/// One-sided (right) derivative of the lower-order term.
///
/// For `power` with `q < 1` the derivative diverges at 0 and infinity is
/// returned; solver code treats a non-finite value as an absent Jacobian
/// contribution.
pub fn eval_f_derivative<T: Real>(s: T, spec: &NonlinearitySpec<T>) -> T {
    match &spec.f {
        FKind::Zero => T::zero(),
        FKind::Power { q, c } => {
            if *c == T::zero() {
                T::zero()
            } else if s == T::zero() {
                if *q > T::one() {
                    T::zero()
                } else if *q == T::one() {
                    *c
                } else {
                    T::infinity()
                }
            } else {
                *c * *q * s.powf(*q - T::one())
            }
        }
        FKind::Linear { m, .. } => *m,
        FKind::Tabulated { points } => {
            let (lo, hi) = bracket(points, s);
            if lo == hi {
                // at or beyond the table ends, or exactly on a breakpoint:
                // take the slope of the segment to the right
                if lo + 1 < points.len() && s >= points[lo].0 {
                    let (x0, y0) = points[lo];
                    let (x1, y1) = points[lo + 1];
                    if s == x0 {
                        return (y1 - y0) / (x1 - x0);
                    }
                }
                T::zero()
            } else {
                let (x0, y0) = points[lo];
                let (x1, y1) = points[hi];
                (y1 - y0) / (x1 - x0)
            }
        }
    }
}

/// Locates `s` in the breakpoint list; returns equal indices outside the
/// table range (constant extension).
fn bracket<T: Real>(points: &[(T, T)], s: T) -> (usize, usize) {
    if s <= points[0].0 {
        return (0, 0);
    }
    let last = points.len() - 1;
    if s >= points[last].0 {
        return (last, last);
    }
    let mut lo = 0;
    let mut hi = last;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if points[mid].0 <= s {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Sampled verdict on the monotone-positive hypothesis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HpReport<T: Real> {
    pub non_decreasing: bool,
    pub strictly_positive_on_positive: bool,
    pub f0_nonneg: bool,
    /// Max adjacent difference quotient on the sample; doubles as the
    /// Lipschitz constant used by the smallness threshold estimate.
    pub lipschitz_estimate: T,
    pub sample_range: [T; 2],
}

impl<T: Real> HpReport<T> {
    pub fn verdict(&self) -> bool {
        self.non_decreasing && self.strictly_positive_on_positive && self.f0_nonneg
    }

    pub fn status(&self) -> HpStatus {
        if self.verdict() {
            HpStatus::Satisfied
        } else if !self.non_decreasing {
            HpStatus::Violated("non-decreasing fails".into())
        } else if !self.strictly_positive_on_positive {
            HpStatus::Violated("f(s)>0 for s>0 fails".into())
        } else {
            HpStatus::Violated("f(0)>=0 fails".into())
        }
    }
}

/// Samples `f` on `[0, s_max]` and reports monotonicity, positivity, sign at
/// zero, and the max difference quotient.
pub fn check_hp<T: Real>(spec: &NonlinearitySpec<T>, s_max: T, samples: usize) -> HpReport<T> {
    let samples = samples.max(100);
    let ds = s_max / real::<T>(samples as f64);
    let mut prev = eval_f(T::zero(), spec);
    let f0_nonneg = prev >= T::zero();
    let mut non_decreasing = true;
    let mut strictly_positive = true;
    let mut lipschitz = T::zero();
    for k in 1..=samples {
        let s = ds * real::<T>(k as f64);
        let v = eval_f(s, spec);
        if v < prev {
            non_decreasing = false;
        }
        if v <= T::zero() {
            strictly_positive = false;
        }
        lipschitz = lipschitz.max((v - prev).abs() / ds);
        prev = v;
    }
    HpReport {
        non_decreasing,
        strictly_positive_on_positive: strictly_positive,
        f0_nonneg,
        lipschitz_estimate: lipschitz,
        sample_range: [T::zero(), s_max],
    }
}
