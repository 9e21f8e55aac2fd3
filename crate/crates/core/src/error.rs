use thiserror::Error;

/// Errors produced by the code, bound and simulation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid symbol vector: {0}")]
    InvalidSymbolVector(String),

    #[error("invalid design: {0}")]
    InvalidDesign(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty code")]
    EmptyCode,

    #[error("unknown label {0}")]
    UnknownLabel(usize),

    #[error("code is not uniform: distance profiles differ (labels {first} and {second})")]
    NonUniform {
        first: usize,
        second: usize,
        /// Sorted distance profile of every label, indexed by label.
        profiles: Vec<Vec<f64>>,
    },

    #[error("code is not spherical: norms range from {min} to {max}")]
    NonSpherical { min: f64, max: f64 },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("quadrature did not converge: estimate {estimate}, error {error_estimate}, {evaluations} evaluations")]
    Quadrature {
        estimate: f64,
        error_estimate: f64,
        evaluations: usize,
    },

    #[error("catalog: {0}")]
    Catalog(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("serialization: {0}")]
    Serde(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
