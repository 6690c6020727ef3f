//! Error type shared across the crate.

use thiserror::Error;

/// Everything that can go wrong while building grids, solving, or verifying.
#[derive(Debug, Clone, Error)]
pub enum CoreError {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("direction is not a unit vector (|nu| deviates by {deviation})")]
    InvalidDirection { deviation: f64 },

    #[error("grid spacing must be positive, got {0}")]
    NonPositiveSpacing(f64),

    #[error("spacing too coarse: only {nodes} interior nodes along axis {axis}, need at least 7")]
    SpacingTooCoarse { axis: usize, nodes: usize },

    #[error("asymmetric grid: {0}")]
    AsymmetricGrid(String),

    #[error("cap is empty: no interior node satisfies x·nu < {lambda}")]
    EmptyCap { lambda: f64 },

    #[error("cap reflects outside the closed domain")]
    CapOutsideDomain,

    #[error("trimmed cap is empty (lambda too close to a(nu) for this spacing)")]
    EmptyTrimmedCap,

    #[error("singular term evaluated at non-positive argument {0}")]
    NonPositiveArgument(f64),

    #[error("regularized term evaluated at negative argument {0}")]
    NegativeArgument(f64),

    #[error("non-positive x in g-tilde evaluation: {0}")]
    NonPositiveX(f64),

    #[error("degenerate cut cell: boundary arm fraction {fraction} below 1e-6 at node {node}")]
    DegenerateCutCell { node: usize, fraction: f64 },

    #[error("linear solver failed to converge within {0} iterations")]
    NoConvergence(usize),

    #[error("Newton iteration stalled: {0}")]
    NewtonStalled(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("field is not strictly positive (min value {0})")]
    NonPositiveField(f64),

    #[error("node subset is empty or disconnected")]
    SingularSubmatrix,

    #[error("grid is not reflection-closed for this axis")]
    AxisNotClosed,

    #[error("radial verification requires a disk domain")]
    NotADisk,

    #[error("nonlinearity violates the monotone-positive hypothesis: {0}")]
    HpViolated(String),

    #[error("missing field file: {0}")]
    MissingField(String),

    #[error("io error: {0}")]
    Io(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl From<std::io::Error> for CoreError {
    fn from(e: std::io::Error) -> Self {
        CoreError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CoreError>;
