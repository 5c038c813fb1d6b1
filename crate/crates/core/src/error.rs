use num_complex::Complex64;
use thiserror::Error;

use crate::quad::QuadratureResult;

/// Failures of the complex Airy kernel.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AiryError {
    #[error("|z| = {modulus} exceeds the supported radius {max}")]
    DomainOverflow { modulus: f64, max: f64 },
    #[error("non-finite Airy argument {0}")]
    NonFinite(Complex64),
    #[error("Airy function at z = {0} overflows double precision")]
    Overflow(Complex64),
    #[error("tail integral needs a >= 0, got {0}")]
    NegativeTailStart(f64),
}

/// Failures of the quadrature engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("subdivision budget exhausted: value {} with error estimate {:e}", .best.value, .best.error_estimate)]
    NotConverged { best: QuadratureResult },
    #[error("error estimate {:e} stalled at the rounding floor above the requested tolerance", .best.error_estimate)]
    RoundoffLimited { best: QuadratureResult },
    #[error("integrand returned a non-finite value at u = {at}")]
    NonFinite { at: f64 },
    #[error("semi-infinite integration needs a truncation rule")]
    MissingTruncation,
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),
}

impl QuadError {
    /// Best available estimate when the failure still produced one.
    pub fn best_estimate(&self) -> Option<&QuadratureResult> {
        match self {
            QuadError::NotConverged { best } | QuadError::RoundoffLimited { best } => Some(best),
            _ => None,
        }
    }
}

/// Crate-level error.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Airy(#[from] AiryError),
    #[error("quadrature failed at c = {c}, x = {x}: {source}")]
    Quadrature {
        c: f64,
        x: f64,
        #[source]
        source: QuadError,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("distribution function at x = {x} evaluated to {value}, outside [0, 1] beyond tolerance")]
    OutOfRange { x: f64, value: f64 },
    #[error("root search for p = {p} did not converge")]
    RootNotFound { p: f64 },
    #[error("simulation too large: {work:e} path steps exceeds the cap {cap:e}")]
    ResourceCap { work: f64, cap: f64 },
    #[error("empty sample")]
    EmptySample,
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
