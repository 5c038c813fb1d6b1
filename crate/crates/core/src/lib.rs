//! Distribution of the maximum of Brownian motion minus a parabola, and of
//! the location of the maximum of two-sided Brownian motion minus `t^2`.
//!
//! Everything is computed from complex Airy functions by adaptive
//! Gauss-Kronrod quadrature; [`mc`] provides a simulation cross-check.

pub mod airy;
pub mod chernoff;
mod ddouble;
pub mod error;
pub mod mc;
pub mod parabola;
pub mod quad;

pub use num_complex::Complex64;

/// Complex values returned by the Airy kernel and the quadrature engine.
pub type ComplexValue = Complex64;

pub use airy::{airy_ai, airy_ai_real, airy_bi, airy_tail_integral, AiryPair, Z_MAX};
pub use error::{AiryError, Error, QuadError, Result};
pub use parabola::{DistributionPoint, DriftCoefficient, ScaledArgument, Side};
pub use quad::{DecayEnvelope, QuadratureResult, QuadratureSpec, Truncation};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "BMPARAB_THREADS";

/// Sizes the global worker pool from `BMPARAB_THREADS` when it is set.
/// Has no effect once the pool has been used.
pub fn configure_threads_from_env() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::InvalidArgument(format!("{THREADS_ENV} must be a positive integer, got '{raw}'")))?;
    // An already-initialized pool is not an error worth failing over.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    Ok(())
}
