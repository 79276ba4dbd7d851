use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("metric is not positive definite: {0}")]
    Metric(String),
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eig:e})")]
    NotPsd { min_eig: f64 },
    #[error("matrix is rank deficient: {0}")]
    RankDeficient(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("face mismatch: {0}")]
    Face(String),
    #[error("degenerate ray: state coincides with the interior point")]
    DegenerateRay,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no separable certificate: lambda {lambda} exceeds threshold {lambda_star}")]
    AboveThreshold { lambda: f64, lambda_star: f64 },
    #[error("total dimension {dim} exceeds the configured cap {cap}")]
    TooLarge { dim: usize, cap: usize },
    #[error("eigensolver did not converge")]
    NoConvergence,
}

pub type Result<T> = std::result::Result<T, Error>;
