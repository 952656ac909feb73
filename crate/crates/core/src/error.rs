use thiserror::Error;

/// Errors raised anywhere in the solver pipeline.
#[derive(Debug, Error)]
pub enum RfmError {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("degenerate sampling: {0}")]
    DegenerateSampling(String),
    #[error("invalid basis: {0}")]
    InvalidBasis(String),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("boundary segment {0} is not covered by any boundary condition")]
    UncoveredSegment(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("interface collocation points are required for the indicator partition with {0} patches")]
    MissingInterface(usize),
    #[error("non-finite entries in least-squares input")]
    NonFinite,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, RfmError>;
