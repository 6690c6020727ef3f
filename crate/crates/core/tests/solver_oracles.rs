//! Solver runs compared against the independent shooting oracles, plus the
//! contract checks that need a full continuation.

mod common;

use std::sync::Arc;

use common::{rk4_shooting_center_value, time_map_center_value, OracleRhs};
use singsym::{
    build_grid, decompose, default_schedule, solve_full, solve_regularized, solve_u0,
    DomainSpec, FKind, NonlinearitySpec, ScalarField, SolveParams,
};

fn interval_grid(h_exp: i32) -> Arc<singsym::Grid64> {
    Arc::new(build_grid(&DomainSpec::interval(-1.0_f64, 1.0), 2.0_f64.powi(h_exp)).unwrap())
}

/// Node at x = 0 (the interval grids here always have even step counts).
fn v_center_node(g: &Arc<singsym::Grid64>) -> usize {
    (0..g.node_count())
        .min_by(|&a, &b| {
            g.coords(a)[0]
                .abs()
                .partial_cmp(&g.coords(b)[0].abs())
                .unwrap()
        })
        .unwrap()
}

#[test]
fn regularized_stage_matches_rk4_oracle() {
    let g = interval_grid(-10);
    let spec = NonlinearitySpec::zero_f(1.0).unwrap();
    let params = SolveParams::default();
    let v = solve_regularized(&g, &spec, 1, &ScalarField::zeros(&g), &params).unwrap();
    let center = v_center_node(&g);
    let oracle = rk4_shooting_center_value(&OracleRhs::regularized(1.0, 1), 1.0, 20_000);
    assert!(
        (v.get(center) - oracle).abs() <= 1e-4,
        "solver {} vs oracle {}",
        v.get(center),
        oracle
    );
}

#[test]
fn residual_decreases_along_accepted_steps() {
    // the damping contract: warm-started stages keep the recorded residual
    // at or below the Newton tolerance, and min increments stay tiny
    let g = interval_grid(-6);
    let params = SolveParams::default();
    let (_, trace) = solve_u0(&g, 2.0, &default_schedule(), &params).unwrap();
    for s in &trace.stages {
        assert!(s.final_residual <= params.newton_tol);
    }
}

#[test]
fn u0_center_matches_time_map_oracle() {
    let g = interval_grid(-10);
    let params = SolveParams::default();
    // deep schedule: at this spacing the regularization bias of the default
    // schedule is on the same order as the agreement tolerance
    let schedule: Vec<u64> = (0..=20).map(|k| 1u64 << k).collect();
    let (u0, _) = solve_u0(&g, 1.0, &schedule, &params).unwrap();
    let center = v_center_node(&g);
    let oracle = time_map_center_value(&OracleRhs::singular(1.0), 1.0);
    assert!(
        (u0.get(center) - oracle).abs() <= 1e-4,
        "solver {} vs oracle {}",
        u0.get(center),
        oracle
    );
}

#[test]
fn full_solution_center_matches_time_map_oracle() {
    let g = interval_grid(-10);
    let params = SolveParams::default();
    let spec = NonlinearitySpec::new(1.0, FKind::Power { q: 1.0, c: 1.0 })
        .unwrap()
        .validated(4.0, 512);
    let schedule: Vec<u64> = (0..=20).map(|k| 1u64 << k).collect();
    let (u, _) = solve_full(&g, &spec, &schedule, &params).unwrap();
    let center = v_center_node(&g);
    let oracle = time_map_center_value(&OracleRhs::singular(1.0).with_power(1.0, 1.0), 1.0);
    assert!(
        (u.get(center) - oracle).abs() <= 1e-4,
        "solver {} vs oracle {}",
        u.get(center),
        oracle
    );
}

#[test]
fn interior_positivity_of_w_on_interval() {
    let g = interval_grid(-6);
    let params = SolveParams::default();
    let schedule = default_schedule();
    let spec = NonlinearitySpec::new(3.0, FKind::Power { q: 0.5, c: 1.0 })
        .unwrap()
        .validated(4.0, 512);
    let (u, _) = solve_full(&g, &spec, &schedule, &params).unwrap();
    let (u0, _) = solve_u0(&g, 3.0, &schedule, &params).unwrap();
    let w = decompose(&u, &u0).unwrap();
    let h = g.h();
    let min_trimmed = (0..g.node_count())
        .filter(|&k| g.boundary_distance(k) >= 4.0 * h)
        .map(|k| w.get(k))
        .fold(f64::INFINITY, f64::min);
    assert!(min_trimmed > 0.0, "trimmed min of w is {min_trimmed}");
}
