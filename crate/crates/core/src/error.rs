use thiserror::Error;

/// Errors raised by the spectral and transmission routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singular parameters: {0}")]
    SingularParameter(String),
    #[error("kernel singularity: {0}")]
    Singularity(String),
    #[error("exact resonance: transmission denominator vanishes at degree {n}")]
    ExactResonance { n: u32 },
    #[error("density is not an eigenfunction: projection residual {residual:.3e} exceeds {tolerance:.3e}")]
    NotEigenfunction { residual: f64, tolerance: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
