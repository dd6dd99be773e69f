use thiserror::Error;

/// Errors raised anywhere in the solver pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point ({x}, {y}) is not on the boundary (phi = {phi:e})")]
    QueryNotOnBoundary { x: f64, y: f64, phi: f64 },

    #[error("boundary projection did not converge from ({x}, {y})")]
    ProjectionDiverged { x: f64, y: f64 },

    #[error("unknown domain `{0}` (expected paper, square or disk)")]
    UnknownDomain(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("point cloud relaxation stalled: displacement {displacement:e} after {iterations} iterations")]
    GenerationStalled { iterations: usize, displacement: f64 },

    #[error("neighborhood of point {index} exhausted at radius {radius:e} with {found} of {required} neighbors")]
    NeighborhoodExhausted {
        index: usize,
        radius: f64,
        found: usize,
        required: usize,
    },

    #[error("stencil needs {required} neighbors, got {found}")]
    InsufficientNeighbors { required: usize, found: usize },

    #[error("stencil constraint system is singular or ill-conditioned (condition estimate {condition:e})")]
    SingularConstraints { condition: f64 },

    #[error("stencil construction failed at point {index}")]
    StencilFailure { index: usize },

    #[error("size mismatch: expected {expected}, got {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("boundary extrapolation failed at point {index}")]
    ExtrapolationFailure { index: usize },

    #[error("sparse matrix is singular: {0}")]
    SingularMatrix(String),

    #[error("degenerate convergence fit: {0}")]
    DegenerateFit(String),

    #[error("cloud file: {0}")]
    CloudFormat(String),

    #[error("reference data: {0}")]
    ReferenceFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
