use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("edge ({0}, {1}) is not present in the graph")]
    MissingEdge(usize, usize),

    #[error("invalid edge ({0}, {1}) for a graph with {2} nodes")]
    InvalidEdge(usize, usize, usize),

    #[error("eigensolver did not converge after {iterations} iterations (max residual {residual:e})")]
    ConvergenceFailure { iterations: usize, residual: f64 },

    #[error("need at least {needed} eigenpairs, have {available}")]
    InsufficientEigenpairs { needed: usize, available: usize },

    #[error("step too large for edge ({m}, {n}): eps * q = {product} >= 1")]
    StepTooLarge { m: usize, n: usize, product: f64 },

    #[error("budget of {requested} extra edges exceeds the {available} available pairs")]
    InvalidBudget { requested: usize, available: usize },

    #[error("brute-force enumeration limited to {limit} nodes, got {n}")]
    TooLarge { n: usize, limit: usize },

    #[error("graph is disconnected (lambda2 = {0:e})")]
    Disconnected(f64),

    #[error("degrees of freedom must exceed 2, got {0}")]
    InvalidDof(f64),

    #[error("reference graph has zero Frobenius norm")]
    ZeroReference,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
