//! Numerical construction and verification toolkit for positive solutions of
//! singular semilinear Dirichlet problems `-Δu = u^(-γ) + f(u)` on symmetric
//! convex domains.
//!
//! The crate builds the solution through a regularized continuation
//! (`-Δu_n = (u_n + 1/n)^(-γ) + f(u_n)`), splits it as `u = u0 + w` against
//! the purely singular profile `u0`, and then checks the qualitative
//! structure of the result on the grid: positivity of `w`, ordering against
//! reflections across sweeping hyperplanes, directional monotonicity, axial
//! and radial symmetry, and the smallness threshold under which boundary
//! ordering propagates to the interior.
//!
//! Core math is generic over the scalar type via [`scalar::Real`]; concrete
//! `f64` aliases are exported at the crate root.

pub mod analysis;
pub mod cap;
pub mod error;
pub mod field;
pub mod geometry;
pub mod grid;
pub mod inequalities;
pub mod io;
pub mod krylov;
pub mod moving_plane;
pub mod newton;
pub mod nonlinearity;
pub mod operator;
pub mod scalar;

pub use analysis::{estimate_delta, h1_seminorm, interior_residual, poincare_constant, DeltaEstimate};
pub use error::{CoreError, Result};
pub use field::ScalarField;
pub use geometry::{lambda1_of_nu, reflect_point, Direction, DomainSpec};
pub use grid::build_grid;
pub use inequalities::{
    bracket, check_bracket_nonpositive, check_factorization_identity, check_g_nonpositive,
    check_g_tilde_monotone, g_gamma, g_tilde, QuadrupleSample,
};
pub use krylov::solve_linear;
pub use moving_plane::{
    run_sweep, SweepReport,
    reflected_values, strong_dichotomy_probe, verify_axial_symmetry, verify_monotonicity,
    verify_positivity, verify_radial, verify_reflection_order, verify_weak_comparison_small,
    DichotomyOutcome, SweepConfig, Verdict,
};
pub use newton::{decompose, default_schedule, solve_full, solve_regularized, solve_u0, SolveParams, SolveTrace};
pub use nonlinearity::{check_hp, FKind, HpStatus, NonlinearitySpec};
pub use operator::{assemble_laplacian, LaplacianOperator};
pub use scalar::Real;

/// Concrete f64 aliases for the main types.
pub type DomainSpec64 = geometry::DomainSpec<f64>;
pub type Direction64 = geometry::Direction<f64>;
pub type Grid64 = grid::Grid<f64>;
pub type CapSection64 = cap::CapSection<f64>;
pub type ScalarField64 = field::ScalarField<f64>;
pub type NonlinearitySpec64 = nonlinearity::NonlinearitySpec<f64>;
