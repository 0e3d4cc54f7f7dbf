use num_complex::Complex64 as Complex;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by zero: denominator value is {0}")]
    DivisionByZero(Complex),

    #[error("composition base mismatch: outer jet taken at {expected}, inner jet has value {found}")]
    BasePointMismatch { expected: Complex, found: Complex },

    #[error("principal power/log needs a right half-plane argument, got {0}")]
    BranchViolation(Complex),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point {0} is outside the open unit disk")]
    OutOfDomain(Complex),

    #[error("not sense-preserving at {z}: |omega| = {modulus}")]
    NotSensePreserving { z: Complex, modulus: f64 },

    #[error("not locally univalent at {0}: derivative vanishes")]
    NotLocallyUnivalent(Complex),

    #[error("consistency check failed: {0}")]
    ConsistencyError(String),

    #[error("power series unavailable: {0}")]
    SeriesUnsupported(String),

    #[error("non-finite value produced at {0}")]
    NonFinite(Complex),
}
