//! Diagnostics on solved fields: strong-form interior residuals, the
//! discrete Dirichlet seminorm, smallest-eigenvalue Poincaré constants on
//! node subsets, the measure threshold for the small-domain comparison, and
//! the grid-refinement study.

use std::collections::VecDeque;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::field::ScalarField;
use crate::grid::Grid;
use crate::krylov::solve_system;
use crate::newton::{solve_u0, SolveParams};
use crate::nonlinearity::{check_hp, eval_f, eval_singular, NonlinearitySpec};
use crate::operator::assemble_laplacian;
use crate::scalar::{as_f64, real, Real};

/// First zero of the Bessel function J0; fixes the smallest Dirichlet
/// eigenvalue of a disk of given measure.
pub const J01: f64 = 2.404825557695773;

/// Strong-form residual `-Δ_h v - v^(-gamma) - f(v)` at interior nodes.
pub fn interior_residual<T: Real>(
    field: &ScalarField<T>,
    spec: &NonlinearitySpec<T>,
) -> Result<ScalarField<T>> {
    let min = field.min_value();
    if min <= T::zero() {
        return Err(CoreError::NonPositiveField(as_f64(min)));
    }
    let op = assemble_laplacian(field.grid())?;
    let mut out = vec![T::zero(); field.len()];
    op.apply(field.values(), &mut out);
    for (k, r) in out.iter_mut().enumerate() {
        let v = field.get(k);
        *r = *r - eval_singular(v, spec)? - eval_f(v, spec);
    }
    ScalarField::from_values(field.grid(), out)
}

/// Sup of |interior residual| over nodes at least `collar * h` from the
/// boundary.
pub fn trimmed_residual_sup<T: Real>(
    field: &ScalarField<T>,
    spec: &NonlinearitySpec<T>,
    collar: usize,
) -> Result<T> {
    let res = interior_residual(field, spec)?;
    let grid = field.grid();
    let cutoff = grid.h() * real::<T>(collar as f64);
    let mut sup = T::zero();
    for k in 0..res.len() {
        if grid.boundary_distance(k) >= cutoff {
            sup = sup.max(res.get(k).abs());
        }
    }
    Ok(sup)
}

/// Discrete Dirichlet seminorm: square root of the sum of one-sided
/// difference quotients squared times the cell measure. Arms cut by the
/// boundary difference against the zero boundary value over the shortened
/// arm.
pub fn h1_seminorm<T: Real>(field: &ScalarField<T>) -> T {
    let grid = field.grid();
    let h = grid.h();
    let measure = grid.measure_per_node();
    let mut acc = T::zero();
    for k in 0..field.len() {
        let v = field.get(k);
        let arms = grid.arms(k);
        for axis in 0..grid.dim() {
            // forward difference to the hi-side neighbor or boundary
            let g_hi = match grid.neighbor(k, axis, 1) {
                Some(m) => (field.get(m) - v) / h,
                None => (T::zero() - v) / (arms.hi[axis] * h),
            };
            acc += g_hi * g_hi * measure;
            // lo-side boundary cells are not covered by any forward
            // difference; add their one-sided quotient
            if grid.neighbor(k, axis, -1).is_none() {
                let g_lo = (v - T::zero()) / (arms.lo[axis] * h);
                acc += g_lo * g_lo * measure;
            }
        }
    }
    acc.sqrt()
}

/// Poincaré constant of a connected node subset: `1 / lambda_min` of the
/// Dirichlet restriction of the discrete Laplacian, by inverse power
/// iteration from the all-ones vector.
pub fn poincare_constant<T: Real>(grid: &Arc<Grid<T>>, subset: &[usize]) -> Result<T> {
    if subset.is_empty() {
        return Err(CoreError::SingularSubmatrix);
    }
    let mut local = vec![usize::MAX; grid.node_count()];
    for (j, &k) in subset.iter().enumerate() {
        if k >= grid.node_count() || local[k] != usize::MAX {
            return Err(CoreError::InvalidInput(
                "subset indices must be unique and in range".into(),
            ));
        }
        local[k] = j;
    }
    check_connected(grid, subset, &local)?;

    let op = assemble_laplacian(grid)?;
    let symmetric = op.is_symmetric();
    let sub_diag: Vec<T> = subset.iter().map(|&k| op.diag()[k]).collect();
    let n = subset.len();
    // Dirichlet restriction: scatter into the full grid with zeros outside
    // the subset, apply, gather back.
    let full = grid.node_count();
    let apply_sub = |xs: &[T], ys: &mut [T]| {
        let mut x_full = vec![T::zero(); full];
        let mut y_full = vec![T::zero(); full];
        for (j, &k) in subset.iter().enumerate() {
            x_full[k] = xs[j];
        }
        op.apply(&x_full, &mut y_full);
        for (j, &k) in subset.iter().enumerate() {
            ys[j] = y_full[k];
        }
    };

    let mut x = vec![T::one() / real::<T>((n as f64).sqrt()); n];
    let mut lambda_prev = T::infinity();
    let tol = real::<T>(1e-8);
    // the Rayleigh quotient is evaluated with an exact operator apply, so
    // the inner solves only need enough accuracy to steer the iteration
    let inner_tol = real::<T>(1e-10) * (T::one() + x.iter().fold(T::zero(), |m, v| m.max(v.abs())));
    for _ in 0..500 {
        let y = if symmetric {
            crate::krylov::pcg(&apply_sub, &sub_diag, &x, inner_tol)?
        } else {
            crate::krylov::bicgstab(&apply_sub, &sub_diag, &x, inner_tol)?
        };

        let mut ay = vec![T::zero(); n];
        apply_sub(&y, &mut ay);
        let yy: T = y.iter().map(|v| *v * *v).sum();
        let yay: T = y.iter().zip(ay.iter()).map(|(a, b)| *a * *b).sum();
        if yy == T::zero() {
            return Err(CoreError::SingularSubmatrix);
        }
        let lambda = yay / yy;
        let norm = yy.sqrt();
        for (xj, yj) in x.iter_mut().zip(y.iter()) {
            *xj = *yj / norm;
        }
        if (lambda - lambda_prev).abs() <= tol * lambda.abs() {
            return Ok(T::one() / lambda);
        }
        lambda_prev = lambda;
    }
    Ok(T::one() / lambda_prev)
}

fn check_connected<T: Real>(grid: &Grid<T>, subset: &[usize], local: &[usize]) -> Result<()> {
    let mut seen = vec![false; subset.len()];
    let mut queue = VecDeque::new();
    queue.push_back(subset[0]);
    seen[local[subset[0]]] = true;
    let mut count = 1;
    while let Some(k) = queue.pop_front() {
        for axis in 0..grid.dim() {
            for side in [-1_i64, 1] {
                if let Some(m) = grid.neighbor(k, axis, side) {
                    let j = local[m];
                    if j != usize::MAX && !seen[j] {
                        seen[j] = true;
                        count += 1;
                        queue.push_back(m);
                    }
                }
            }
        }
    }
    if count != subset.len() {
        return Err(CoreError::SingularSubmatrix);
    }
    Ok(())
}

/// How the measure threshold converts into a Poincaré bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoincareBoundRule {
    /// Ball-extremal closed form: among sets of fixed measure the ball
    /// maximizes the Poincaré constant.
    FaberKrahnClosedForm,
    /// Direct smallest-eigenvalue solve on a concrete subset.
    DirectEigen,
}

/// Measure threshold under which boundary ordering propagates inward.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DeltaEstimate<T> {
    /// Lipschitz constant of `f` on `[0, sup u]`.
    pub lipschitz_c: T,
    pub rule: PoincareBoundRule,
    /// Measure threshold; infinite (serialized as null) when `f` has zero
    /// Lipschitz constant.
    pub delta: T,
}

/// Computes the threshold: the measure of the ball whose Poincaré constant
/// `C_p` satisfies `C * C_p = 1/2`, with `C` the sampled Lipschitz constant
/// of `f` on the range of `u`.
pub fn estimate_delta<T: Real>(
    u: &ScalarField<T>,
    spec: &NonlinearitySpec<T>,
) -> DeltaEstimate<T> {
    let s_max = u.max_value().max(real(1e-6));
    let c = check_hp(spec, s_max, 1024).lipschitz_estimate;
    let delta = if c <= T::zero() {
        T::infinity()
    } else if u.grid().dim() == 1 {
        // interval of length L has C_p = (L/pi)^2
        real::<T>(std::f64::consts::PI) / (real::<T>(2.0) * c).sqrt()
    } else {
        // disk of measure m has lambda_1 = pi j01^2 / m
        real::<T>(std::f64::consts::PI * J01 * J01) / (real::<T>(2.0) * c)
    };
    DeltaEstimate {
        lipschitz_c: c,
        rule: PoincareBoundRule::FaberKrahnClosedForm,
        delta,
    }
}

/// Validates a concrete subset against a threshold, either by its measure
/// (ball-extremal route) or by a direct eigenvalue solve.
pub fn delta_applies<T: Real>(
    grid: &Arc<Grid<T>>,
    subset: &[usize],
    estimate: &DeltaEstimate<T>,
    rule: PoincareBoundRule,
) -> Result<bool> {
    match rule {
        PoincareBoundRule::FaberKrahnClosedForm => {
            let measure = grid.measure_per_node() * real::<T>(subset.len() as f64);
            Ok(measure <= estimate.delta)
        }
        PoincareBoundRule::DirectEigen => {
            if estimate.lipschitz_c <= T::zero() {
                return Ok(true);
            }
            let cp = poincare_constant(grid, subset)?;
            Ok(estimate.lipschitz_c * cp <= real::<T>(0.5))
        }
    }
}

/// One level of the refinement study.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RefineRow<T> {
    pub h: T,
    pub h1_seminorm: T,
    pub center_value: T,
    pub residual_sup: T,
}

/// Solves the singular profile at `h, h/2, h/4, ...` and reports the
/// Dirichlet seminorm, the center value and the trimmed residual per level.
pub fn refinement_study<T: Real>(
    spec: &crate::geometry::DomainSpec<T>,
    gamma: T,
    h0: T,
    levels: usize,
    schedule: &[u64],
    params: &SolveParams<T>,
) -> Result<Vec<RefineRow<T>>> {
    if levels < 3 {
        return Err(CoreError::InvalidInput(
            "refinement study needs at least 3 levels".into(),
        ));
    }
    let zero_spec = NonlinearitySpec::zero_f(gamma)?;
    let mut rows = Vec::with_capacity(levels);
    let mut h = h0;
    for _ in 0..levels {
        let grid = Arc::new(crate::grid::build_grid(spec, h)?);
        let (u0, _) = solve_u0(&grid, gamma, schedule, params)?;
        rows.push(RefineRow {
            h,
            h1_seminorm: h1_seminorm(&u0),
            center_value: u0.get(u0.center_node()),
            residual_sup: trimmed_residual_sup(&u0, &zero_spec, 4)?,
        });
        h = h * real::<T>(0.5);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainSpec;
    use crate::grid::build_grid;
    use crate::nonlinearity::FKind;

    fn shared(spec: DomainSpec<f64>, h: f64) -> Arc<Grid<f64>> {
        Arc::new(build_grid(&spec, h).unwrap())
    }

    #[test]
    fn manufactured_residual() {
        let g = shared(DomainSpec::interval(-1.0_f64, 1.0), 0.125);
        let spec = NonlinearitySpec::zero_f(1.0).unwrap();
        let field = ScalarField::from_fn(&g, |p| (1.0 - p[0] * p[0]) / 2.0);
        let res = interior_residual(&field, &spec).unwrap();
        for k in 0..g.node_count() {
            let x = g.coords(k)[0];
            let expected = 1.0 - 2.0 / (1.0 - x * x);
            assert!((res.get(k) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn nonpositive_field_rejected() {
        let g = shared(DomainSpec::interval(-1.0_f64, 1.0), 0.125);
        let spec = NonlinearitySpec::zero_f(1.0).unwrap();
        let field = ScalarField::zeros(&g);
        assert!(matches!(
            interior_residual(&field, &spec),
            Err(CoreError::NonPositiveField(_))
        ));
    }

    #[test]
    fn seminorm_of_quadratic() {
        let h = 2.0_f64.powi(-6);
        let g = shared(DomainSpec::interval(-1.0_f64, 1.0), h);
        let field = ScalarField::from_fn(&g, |p| (1.0 - p[0] * p[0]) / 2.0);
        let expected = (2.0 / 3.0_f64).sqrt();
        assert!((h1_seminorm(&field) - expected).abs() < 5.0 * h);
        assert_eq!(h1_seminorm(&ScalarField::zeros(&g)), 0.0);
    }

    #[test]
    fn poincare_interval_closed_form() {
        let h = 1.0 / 128.0;
        let g = shared(DomainSpec::interval(0.0_f64, 1.0), h);
        let all: Vec<usize> = (0..g.node_count()).collect();
        let cp = poincare_constant(&g, &all).unwrap();
        let lambda = 4.0 / (h * h) * (std::f64::consts::PI * h / 2.0).sin().powi(2);
        assert!(
            (cp - 1.0 / lambda).abs() <= 1e-6 * cp,
            "cp {cp} vs closed form {}",
            1.0 / lambda
        );
    }

    #[test]
    fn poincare_domain_monotonicity() {
        let g = shared(DomainSpec::interval(0.0_f64, 1.0), 1.0 / 32.0);
        let all: Vec<usize> = (0..g.node_count()).collect();
        let half: Vec<usize> = (0..g.node_count() / 2).collect();
        let cp_all = poincare_constant(&g, &all).unwrap();
        let cp_half = poincare_constant(&g, &half).unwrap();
        assert!(cp_half <= cp_all * (1.0 + 1e-8));
    }

    #[test]
    fn disconnected_subset_rejected() {
        let g = shared(DomainSpec::interval(0.0_f64, 1.0), 1.0 / 32.0);
        let subset = vec![0, 1, 2, 10, 11];
        assert!(matches!(
            poincare_constant(&g, &subset),
            Err(CoreError::SingularSubmatrix)
        ));
        assert!(matches!(
            poincare_constant(&g, &[]),
            Err(CoreError::SingularSubmatrix)
        ));
    }

    #[test]
    fn delta_closed_forms() {
        // 2D with C = 100
        let g = shared(DomainSpec::disk([0.0_f64, 0.0], 1.0), 0.125);
        let spec = NonlinearitySpec::new(1.0, FKind::Linear { m: 100.0, b: 0.0 }).unwrap();
        let u = ScalarField::constant(&g, 1.0);
        let est = estimate_delta(&u, &spec);
        assert!((est.delta - 0.0908).abs() < 1e-4, "delta {}", est.delta);

        // 1D with C = 1
        let g1 = shared(DomainSpec::interval(-1.0_f64, 1.0), 0.125);
        let spec1 = NonlinearitySpec::new(1.0, FKind::Linear { m: 1.0, b: 0.0 }).unwrap();
        let u1 = ScalarField::constant(&g1, 1.0);
        let est1 = estimate_delta(&u1, &spec1);
        assert!((est1.delta - std::f64::consts::PI / 2.0_f64.sqrt()).abs() < 1e-10);

        // zero f: infinite sentinel
        let z = NonlinearitySpec::zero_f(2.0).unwrap();
        let est_z = estimate_delta(&u1, &z);
        assert!(est_z.delta.is_infinite());
    }

    #[test]
    fn faber_krahn_dominates_direct_eigen() {
        // any concrete subset of measure below delta must also pass the
        // direct eigenvalue route
        let g = shared(DomainSpec::disk([0.0_f64, 0.0], 1.0), 2.0_f64.powi(-4));
        let spec = NonlinearitySpec::new(1.0, FKind::Linear { m: 40.0, b: 0.0 }).unwrap();
        let u = ScalarField::constant(&g, 1.0);
        let est = estimate_delta(&u, &spec);
        // rectangular patch of nodes around the center with measure <= delta
        let mut subset = Vec::new();
        for k in 0..g.node_count() {
            let p = g.coords(k);
            if p[0].abs() < 0.15 && p[1].abs() < 0.2 {
                subset.push(k);
            }
        }
        let measure = g.measure_per_node() * subset.len() as f64;
        assert!(measure <= est.delta, "patch measure {measure} vs delta {}", est.delta);
        assert!(delta_applies(&g, &subset, &est, PoincareBoundRule::FaberKrahnClosedForm).unwrap());
        assert!(delta_applies(&g, &subset, &est, PoincareBoundRule::DirectEigen).unwrap());
    }
}
