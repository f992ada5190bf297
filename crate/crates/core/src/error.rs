use thiserror::Error;

/// Errors produced by the simulation and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HybridError {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("index {index} out of range for dimension {dim}")]
    OutOfRange { index: usize, dim: usize },

    #[error("duplicate mode label `{0}`")]
    LabelCollision(String),

    #[error("unknown mode label `{0}`")]
    UnknownLabel(String),

    #[error("{name} = {value} is outside {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("invalid POVM element: {0}")]
    InvalidPovm(String),

    #[error("operator is not normalized (trace = {0})")]
    NotNormalized(f64),

    #[error("truncation inadequate: {0}")]
    Truncation(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("objective is not monotone near {at}")]
    NonMonotone { at: f64 },

    #[error("objective is flat over the search range")]
    NoOptimum,
}

pub type Result<T> = std::result::Result<T, HybridError>;

/// Checks `lo <= value <= hi`, rejecting NaN.
pub(crate) fn check_range(name: &'static str, value: f64, lo: f64, hi: f64, domain: &'static str) -> Result<()> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(())
    } else {
        Err(HybridError::Domain { name, value, domain })
    }
}

pub(crate) fn check_unit(name: &'static str, value: f64) -> Result<()> {
    check_range(name, value, 0.0, 1.0, "[0, 1]")
}
