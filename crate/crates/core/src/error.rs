use thiserror::Error;

/// Errors raised by estimation and numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("probability {0} outside (0, 1)")]
    InvalidProbability(f64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("survival function underflows at x = {0}")]
    SaturatedCdf(f64),
    #[error("no sign change on bracket [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("no convergence after {0} iterations")]
    MaxIterations(usize),
    #[error("singular jacobian at ({0}, {1})")]
    SingularJacobian(f64, f64),
    #[error("failed to converge: {0}")]
    NonConvergence(String),
    #[error("both scale parameters collapsed to zero")]
    BoundaryCollapse,
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),
    #[error("quadrature did not reach tolerance (estimate {estimate}, error {error})")]
    Quadrature { estimate: f64, error: f64 },
    #[error("sample must be sorted in nondecreasing order")]
    Unsorted,
    #[error("invalid censoring scheme: {0}")]
    InvalidScheme(String),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("information matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("{failed} of {attempted} bootstrap refits failed")]
    BootstrapFailures { failed: usize, attempted: usize },
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("no data values found")]
    EmptyData,
    #[error("line {line}: value {value} is not positive")]
    NonPositive { line: usize, value: f64 },
    #[error("invalid config field `{field}`: {message}")]
    InvalidConfig { field: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
