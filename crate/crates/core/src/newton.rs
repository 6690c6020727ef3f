//! Damped Newton solves of the regularized problems
//! `-Δ v = (v + 1/n)^(-gamma) + f(v)` and the warm-started continuation in
//! `n` that produces the singular profile `u0`, the full solution `u`, and
//! the decomposition `w = u - u0`.
//!
//! Iterates are kept non-negative by step backtracking, never by clamping
//! values; a step is accepted only when the residual sup-norm strictly
//! decreases and the candidate stays in the non-negative cone.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::field::ScalarField;
use crate::grid::Grid;
use crate::krylov::solve_system;
use crate::nonlinearity::{
    eval_f, eval_f_derivative, eval_regularized, HpStatus, NonlinearitySpec,
};
use crate::operator::{assemble_laplacian, LaplacianOperator};
use crate::scalar::{as_f64, real, Real};

/// Solver tolerances and iteration limits.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SolveParams<T> {
    /// Residual sup-norm target of each Newton solve.
    pub newton_tol: T,
    /// Relative tolerance of inner linear solves.
    pub linear_tol: T,
    /// Stage-to-stage sup-difference below which the continuation stops.
    pub stage_tol: T,
    pub max_newton_iters: usize,
    pub max_halvings: usize,
}

impl<T: Real> Default for SolveParams<T> {
    fn default() -> Self {
        SolveParams {
            newton_tol: real(1e-9),
            linear_tol: real(1e-12),
            stage_tol: real(1e-8),
            max_newton_iters: 80,
            max_halvings: 30,
        }
    }
}

/// Default regularization schedule: n = 1, 2, 4, ..., 2^14.
pub fn default_schedule() -> Vec<u64> {
    (0..=14).map(|k| 1u64 << k).collect()
}

/// Per-stage record of the continuation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageRecord<T> {
    pub n: u64,
    pub newton_iterations: usize,
    pub final_residual: T,
    /// Min nodewise increment against the previous stage (first stage:
    /// against the initial guess).
    pub min_increment: T,
    pub damping_events: usize,
}

/// Convergence record of the whole continuation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveTrace<T> {
    pub stages: Vec<StageRecord<T>>,
    /// Stage n at which the sup stage difference dropped below `stage_tol`.
    pub early_stop_stage: Option<u64>,
}

struct NewtonOutcome<T: Real> {
    field: ScalarField<T>,
    iterations: usize,
    final_residual: T,
    damping_events: usize,
}

fn residual<T: Real>(
    op: &LaplacianOperator<T>,
    spec: &NonlinearitySpec<T>,
    n: u64,
    v: &[T],
    out: &mut [T],
) -> Result<T> {
    op.apply(v, out);
    let mut sup = T::zero();
    for k in 0..v.len() {
        let rhs = eval_regularized(v[k], n, spec)? + eval_f(v[k], spec);
        out[k] = out[k] - rhs;
        sup = sup.max(out[k].abs());
    }
    Ok(sup)
}

fn newton_solve<T: Real>(
    op: &LaplacianOperator<T>,
    spec: &NonlinearitySpec<T>,
    n: u64,
    init: &ScalarField<T>,
    params: &SolveParams<T>,
) -> Result<NewtonOutcome<T>> {
    let size = op.n();
    let mut v = init.values().to_vec();
    if v.iter().any(|x| *x < T::zero()) {
        return Err(CoreError::InvalidInput(
            "initial guess must be non-negative".into(),
        ));
    }
    let mut res = vec![T::zero(); size];
    let mut res_norm = residual(op, spec, n, &v, &mut res)?;
    let mut damping_events = 0;
    let mut iterations = 0;

    // the residual evaluation itself carries rounding noise of order
    // eps * |diag| * |v|; the target cannot honestly go below that
    let diag_max = op.diag().iter().fold(T::zero(), |m, d| m.max(*d));
    let noise_floor = |v: &[T]| {
        let sup_v = v.iter().fold(T::zero(), |m, x| m.max(x.abs()));
        real::<T>(8.0) * T::epsilon() * diag_max * (T::one() + sup_v)
    };

    loop {
        let target = params.newton_tol.max(noise_floor(&v));
        if res_norm <= target {
            break;
        }
        if iterations >= params.max_newton_iters {
            return Err(CoreError::NewtonStalled(format!(
                "residual {res_norm} after {iterations} iterations at stage n={n}"
            )));
        }
        // Jacobian diagonal shift: gamma (v + 1/n)^(-gamma-1) - f'(v).
        // A diverging f' (sublinear power at 0) contributes nothing.
        let shift: Vec<T> = v
            .iter()
            .map(|&x| {
                let reg = spec.gamma
                    * (x + real::<T>(1.0 / n as f64)).powf(-spec.gamma - T::one());
                let fp = eval_f_derivative(x, spec);
                if fp.is_finite() {
                    reg - fp
                } else {
                    reg
                }
            })
            .collect();
        let neg_res: Vec<T> = res.iter().map(|r| -*r).collect();
        // inexact-Newton forcing: each inner solve reduces the residual by
        // two orders, which keeps the tolerance attainable at any spacing
        let tol_abs = (real::<T>(0.01) * res_norm).max(params.linear_tol * (T::one() + res_norm));
        let delta = solve_system(op, Some(&shift), &neg_res, tol_abs)?;

        let mut alpha = T::one();
        let mut accepted = false;
        for halving in 0..=params.max_halvings {
            let candidate: Vec<T> = v
                .iter()
                .zip(delta.iter())
                .map(|(x, d)| *x + alpha * *d)
                .collect();
            if candidate.iter().all(|x| *x >= T::zero()) {
                let mut cand_res = vec![T::zero(); size];
                let cand_norm = residual(op, spec, n, &candidate, &mut cand_res)?;
                if cand_norm < res_norm {
                    v = candidate;
                    res = cand_res;
                    res_norm = cand_norm;
                    accepted = true;
                    damping_events += halving;
                    break;
                }
            }
            alpha = alpha * real::<T>(0.5);
        }
        if !accepted {
            return Err(CoreError::NewtonStalled(format!(
                "damping exhausted at stage n={n} with residual {res_norm}"
            )));
        }
        iterations += 1;
    }

    Ok(NewtonOutcome {
        field: ScalarField::from_values(op.grid(), v)?,
        iterations,
        final_residual: res_norm,
        damping_events,
    })
}

/// One regularized solve at stage `n` starting from `init`.
pub fn solve_regularized<T: Real>(
    grid: &Arc<Grid<T>>,
    spec: &NonlinearitySpec<T>,
    n: u64,
    init: &ScalarField<T>,
    params: &SolveParams<T>,
) -> Result<ScalarField<T>> {
    let op = assemble_laplacian(grid)?;
    Ok(newton_solve(&op, spec, n, init, params)?.field)
}

fn continuation<T: Real>(
    grid: &Arc<Grid<T>>,
    spec: &NonlinearitySpec<T>,
    schedule: &[u64],
    init: &ScalarField<T>,
    params: &SolveParams<T>,
) -> Result<(ScalarField<T>, SolveTrace<T>)> {
    if schedule.is_empty() || schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CoreError::InvalidInput(
            "schedule must be non-empty and strictly increasing".into(),
        ));
    }
    let op = assemble_laplacian(grid)?;
    let mut prev = init.clone();
    let mut current = init.clone();
    let mut trace = SolveTrace { stages: Vec::new(), early_stop_stage: None };

    for (stage, &n) in schedule.iter().enumerate() {
        let outcome = newton_solve(&op, spec, n, &current, params)?;
        current = outcome.field;
        let diff = current.sub(&prev)?;
        trace.stages.push(StageRecord {
            n,
            newton_iterations: outcome.iterations,
            final_residual: outcome.final_residual,
            min_increment: diff.min_value(),
            damping_events: outcome.damping_events,
        });
        if stage > 0 && diff.sup_norm() <= params.stage_tol {
            trace.early_stop_stage = Some(n);
            break;
        }
        prev = current.clone();
    }
    Ok((current, trace))
}

/// Purely singular profile: continuation of `-Δ v = (v + 1/n)^(-gamma)`
/// started from zero.
pub fn solve_u0<T: Real>(
    grid: &Arc<Grid<T>>,
    gamma: T,
    schedule: &[u64],
    params: &SolveParams<T>,
) -> Result<(ScalarField<T>, SolveTrace<T>)> {
    let spec = NonlinearitySpec::zero_f(gamma)?;
    continuation(grid, &spec, schedule, &ScalarField::zeros(grid), params)
}

/// Same continuation from a caller-supplied first-stage guess (used to
/// exercise the uniqueness contract).
pub fn solve_u0_from<T: Real>(
    grid: &Arc<Grid<T>>,
    gamma: T,
    schedule: &[u64],
    init: &ScalarField<T>,
    params: &SolveParams<T>,
) -> Result<(ScalarField<T>, SolveTrace<T>)> {
    let spec = NonlinearitySpec::zero_f(gamma)?;
    continuation(grid, &spec, schedule, init, params)
}

/// Full problem `-Δ u = u^(-gamma) + f(u)` via the same continuation.
///
/// The lower-order term must either be zero or not have a recorded
/// hypothesis violation.
pub fn solve_full<T: Real>(
    grid: &Arc<Grid<T>>,
    spec: &NonlinearitySpec<T>,
    schedule: &[u64],
    params: &SolveParams<T>,
) -> Result<(ScalarField<T>, SolveTrace<T>)> {
    if let HpStatus::Violated(reason) = &spec.hp_status {
        if !spec.is_zero_f() {
            return Err(CoreError::HpViolated(reason.clone()));
        }
    }
    continuation(grid, spec, schedule, &ScalarField::zeros(grid), params)
}

/// Splits `u = u0 + w`, i.e. returns `w = u - u0`.
pub fn decompose<T: Real>(u: &ScalarField<T>, u0: &ScalarField<T>) -> Result<ScalarField<T>> {
    u.sub(u0)
}

/// Debug rendering of a residual scale for error messages.
#[allow(dead_code)]
fn fmt_norm<T: Real>(x: T) -> String {
    format!("{:.3e}", as_f64(x))
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
    fn stage_solution_is_symmetric() {
        let g = shared(DomainSpec::interval(-1.0_f64, 1.0), 2.0_f64.powi(-5));
        let spec = NonlinearitySpec::zero_f(1.0).unwrap();
        let params = SolveParams::default();
        let v = solve_regularized(&g, &spec, 1, &ScalarField::zeros(&g), &params).unwrap();
        let perm = g.reflection_perm(0).unwrap();
        for k in 0..g.node_count() {
            assert!((v.get(k) - v.get(perm[k] as usize)).abs() < 1e-9);
        }
        assert!(v.min_value() > 0.0);
    }

    #[test]
    fn monotone_stages_on_interval() {
        let g = shared(DomainSpec::interval(-1.0_f64, 1.0), 2.0_f64.powi(-5));
        let params = SolveParams::default();
        let (_, trace) = solve_u0(&g, 1.0, &default_schedule(), &params).unwrap();
        for stage in &trace.stages {
            assert!(stage.min_increment >= -1e-10, "stage n={} dipped", stage.n);
            assert!(stage.final_residual <= params.newton_tol);
        }
    }

    #[test]
    fn uniqueness_of_the_limit() {
        let g = shared(DomainSpec::interval(-1.0_f64, 1.0), 2.0_f64.powi(-5));
        let params = SolveParams::default();
        let schedule = default_schedule();
        let (a, _) = solve_u0(&g, 1.0, &schedule, &params).unwrap();
        let ones = ScalarField::constant(&g, 1.0);
        let (b, _) = solve_u0_from(&g, 1.0, &schedule, &ones, &params).unwrap();
        assert!(a.sup_distance(&b).unwrap() <= 10.0 * params.stage_tol);
    }

    #[test]
    fn zero_f_reproduces_u0() {
        let g = shared(DomainSpec::interval(-1.0_f64, 1.0), 2.0_f64.powi(-5));
        let params = SolveParams::default();
        let schedule = default_schedule();
        let spec = NonlinearitySpec::zero_f(1.0).unwrap();
        let (u, _) = solve_full(&g, &spec, &schedule, &params).unwrap();
        let (u0, _) = solve_u0(&g, 1.0, &schedule, &params).unwrap();
        let w = decompose(&u, &u0).unwrap();
        assert!(w.sup_norm() <= 10.0 * params.stage_tol);
    }

    #[test]
    fn recompose_is_exact() {
        let g = shared(DomainSpec::interval(-1.0_f64, 1.0), 0.125);
        let u = ScalarField::from_fn(&g, |p| 1.0 + p[0] * 0.3);
        let u0 = ScalarField::from_fn(&g, |p| 0.5 - p[0] * 0.1);
        let w = decompose(&u, &u0).unwrap();
        let back = u0.add(&w).unwrap();
        for k in 0..g.node_count() {
            assert_eq!(back.get(k), u.get(k));
        }
    }

    #[test]
    fn super_solution_ordering() {
        let g = shared(DomainSpec::interval(-1.0_f64, 1.0), 2.0_f64.powi(-5));
        let params = SolveParams::default();
        let schedule = default_schedule();
        let spec = NonlinearitySpec::new(1.0, FKind::Power { q: 1.0, c: 1.0 })
            .unwrap()
            .validated(4.0, 512);
        let (u, _) = solve_full(&g, &spec, &schedule, &params).unwrap();
        let (u0, _) = solve_u0(&g, 1.0, &schedule, &params).unwrap();
        let w = decompose(&u, &u0).unwrap();
        assert!(w.min_value() >= -10.0 * params.stage_tol);
    }

    #[test]
    fn stall_on_nonexistent_problem() {
        // a linear term with slope above the principal eigenvalue admits no
        // positive solution, so the damped Newton must report a stall
        let g = shared(DomainSpec::interval(-1.0_f64, 1.0), 2.0_f64.powi(-4));
        let params = SolveParams::default();
        let spec = NonlinearitySpec::new(1.0, FKind::Linear { m: 10.0, b: 0.0 })
            .unwrap()
            .validated(4.0, 512);
        let err = solve_full(&g, &spec, &default_schedule(), &params).unwrap_err();
        assert!(
            matches!(err, CoreError::NewtonStalled(_) | CoreError::NoConvergence(_)),
            "unexpected error {err:?}"
        );
    }

    #[test]
    fn hp_violation_blocks_solve() {
        let g = shared(DomainSpec::interval(-1.0_f64, 1.0), 0.125);
        let spec = NonlinearitySpec::new(
            1.0,
            FKind::Tabulated { points: vec![(0.0, 1.0), (1.0, 0.5)] },
        )
        .unwrap()
        .validated(1.0, 128);
        let err = solve_full(&g, &spec, &default_schedule(), &SolveParams::default());
        assert!(matches!(err, Err(CoreError::HpViolated(_))));
    }
}
