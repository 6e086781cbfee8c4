use thiserror::Error;

/// Errors raised by mesh construction, operators and solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter grid: {0}")]
    InvalidGrid(String),

    #[error("scalar field grid does not match the operator grid")]
    GridMismatch,

    #[error("degenerate metric (EG - F^2 <= 0) at {} node(s), first offenders: {:?}", .0.len(), first_nodes(.0))]
    DegenerateMetric(Vec<(usize, usize)>),

    #[error("invalid fixture parameter: {0}")]
    InvalidFixture(String),

    #[error("spectral degeneracy: {0}")]
    SpectralDegeneracy(String),

    #[error("contraction failure at iteration {iter}: consecutive factors {factors:?} >= 1; H target too large for this patch")]
    ContractionFailure { iter: usize, factors: [f64; 2] },

    #[error("eigenvalue iteration did not converge within {0} iterations")]
    EigenNoConvergence(usize),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("nonpositive field: {0}")]
    NonPositive(String),

    #[error("geodesic ball of radius {radius} reaches the mesh boundary (min boundary distance {boundary_dist})")]
    BallOverflow { radius: f64, boundary_dist: f64 },

    #[error("mesh not chartable for this axis: {0}")]
    ChartError(String),

    #[error("linear solve failed: {0}")]
    SolveFailure(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

fn first_nodes(nodes: &[(usize, usize)]) -> Vec<(usize, usize)> {
    nodes.iter().take(8).copied().collect()
}

