//! Distribution of the maximum of `W(t) - c t^2`.
//!
//! For one-sided Brownian motion, with `z = (4c)^{1/3} x`,
//!
//! ```text
//! F_c(x) = 1 - int_z^inf Ai(u) du
//!            - 2 Re{ e^{-i pi/6} int_0^inf Ai(e^{-i pi/6} u) Ai(iu + z) / Ai(iu) du }
//! f_c(x) = (4c)^{1/3} { Ai(z)
//!            - 2 Re( e^{-i pi/6} int_0^inf Ai(e^{-i pi/6} u) Ai'(iu + z) / Ai(iu) du ) }
//! ```
//!
//! Both integrands decay like `exp(-(sqrt 2 / 3) u^{3/2})`. The two-sided
//! maximum is the larger of two independent one-sided maxima, so its
//! distribution function is `F_c^2` and its density `2 f_c F_c`.
//!
//! The Bi-form `F_c(x) = 1/2 int {Ai(iu) Bi(iu+z) - Bi(iu) Ai(iu+z)} / Ai(iu) du`
//! is kept as an independent route for cross-checking; it loses digits to
//! cancellation and is not used for production values.

use num_complex::Complex64;
use rayon::prelude::*;
use std::cell::Cell;
use std::f64::consts::{FRAC_PI_3, FRAC_PI_6, SQRT_2};
use std::fmt;
use std::str::FromStr;

use crate::airy::{airy_ai, airy_bi, airy_tail_integral};
use crate::error::{AiryError, Error, QuadError, Result};
use crate::quad::{
    integrate_interval, integrate_real_line, integrate_semi_infinite, DecayEnvelope,
    QuadratureResult, QuadratureSpec, Truncation,
};

/// Asymptotic decay rate `sqrt(2)/3` of `|Ai(e^{-i pi/6} u)|` in `u^{3/2}`.
const RAY_DECAY: f64 = SQRT_2 / 3.0;

/// Truncation of the Bi-form integral. Its numerator and denominator both
/// grow like `exp(RAY_DECAY |u|^{3/2})`, so beyond this the quotient is
/// rounding noise.
pub const U_BI: f64 = 12.0;

/// Past this scaled argument `1 - F_c` is below `exp(-300)`.
const Z_SATURATION: f64 = 60.0;

/// Largest supported moment order.
pub const MAX_MOMENT_ORDER: u32 = 8;

/// Slack on the `[0, 1]` range of a computed distribution function.
pub const CDF_SLACK: f64 = 1e-8;

/// Density values in `[-PDF_FLOOR, 0)` are clamped to zero.
pub const PDF_FLOOR: f64 = 1e-10;

/// Coefficient `c > 0` of the parabola.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct DriftCoefficient(f64);

impl DriftCoefficient {
    pub fn new(c: f64) -> Result<Self> {
        if c > 0.0 && c.is_finite() {
            Ok(Self(c))
        } else {
            Err(Error::InvalidArgument(format!(
                "drift coefficient must be positive and finite, got {c}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `(4c)^{1/3}`
    pub fn scale(self) -> f64 {
        (4.0 * self.0).cbrt()
    }
}

/// `z = (4c)^{1/3} x` for some `x >= 0`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct ScaledArgument(f64);

impl ScaledArgument {
    pub fn new(c: DriftCoefficient, x: f64) -> Result<Self> {
        if x.is_nan() || x < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "the maximum is nonnegative; x must be >= 0, got {x}"
            )));
        }
        if x.is_infinite() {
            return Err(Error::InvalidArgument("x must be finite".into()));
        }
        Ok(Self(c.scale() * x))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// One-sided (`t >= 0`) or two-sided (`t` in R) Brownian motion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    One,
    Two,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::One => "one",
            Side::Two => "two",
        })
    }
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one" => Ok(Side::One),
            "two" => Ok(Side::Two),
            other => Err(Error::InvalidArgument(format!(
                "side must be 'one' or 'two', got '{other}'"
            ))),
        }
    }
}

/// Distribution function and density at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistributionPoint {
    pub x: f64,
    pub cdf: f64,
    pub pdf: f64,
}

fn rotation() -> Complex64 {
    Complex64::from_polar(1.0, -FRAC_PI_6)
}

/// Runs `body` with an Airy evaluator that records the first failure; a
/// failure is surfaced as `Error::Airy` instead of the quadrature's NaN report.
fn with_airy_guard<T>(
    c: f64,
    x: f64,
    body: impl FnOnce(&dyn Fn(Complex64) -> Option<crate::airy::AiryPair>) -> std::result::Result<T, QuadError>,
) -> Result<T> {
    let failure: Cell<Option<AiryError>> = Cell::new(None);
    let eval = |z: Complex64| match airy_ai(z) {
        Ok(p) => Some(p),
        Err(e) => {
            let previous = failure.take();
            failure.set(previous.or(Some(e)));
            None
        }
    };
    let outcome = body(&eval);
    if let Some(e) = failure.take() {
        return Err(Error::Airy(e));
    }
    outcome.map_err(|source| Error::Quadrature { c, x, source })
}

/// `int_0^inf Ai(e^{-i pi/6} u) A(iu + z) / Ai(iu) du` with `A = Ai` or `Ai'`.
fn ratio_integral(c: f64, x: f64, z: f64, derivative: bool, spec: &QuadratureSpec) -> Result<Complex64> {
    // |Ai(e^{-i pi/6} u)| ~ u^{-1/4} exp(-RAY_DECAY u^{3/2}) / (2 sqrt pi) and
    // |A(iu+z)/Ai(iu)| <= C (1+u)^{1/2} exp(-z sqrt(u/2)) past max(4, z); the
    // power prefactors fit under unit scale once the rate is shaded by 10%.
    let envelope = DecayEnvelope::new(1.0, 0.9 * RAY_DECAY, 1.5, z.max(4.0));
    let spec = spec.with_envelope(envelope);
    let rot = rotation();
    with_airy_guard(c, x, |ai| {
        integrate_semi_infinite(
            |u| {
                let nan = Complex64::new(f64::NAN, 0.0);
                let (Some(ray), Some(shifted), Some(axis)) = (
                    ai(rot * u),
                    ai(Complex64::new(z, u)),
                    ai(Complex64::new(0.0, u)),
                ) else {
                    return nan;
                };
                let numerator = if derivative {
                    shifted.derivative
                } else {
                    shifted.value
                };
                ray.value * numerator / axis.value
            },
            &spec,
        )
        .map(|r| r.value)
    })
}

/// `F_c(x)` before clamping; may stray outside `[0, 1]` by the quadrature error.
pub fn cdf_one_sided_raw(c: DriftCoefficient, x: f64, spec: &QuadratureSpec) -> Result<f64> {
    let z = ScaledArgument::new(c, x)?.value();
    if z > Z_SATURATION {
        return Ok(1.0);
    }
    let tail = airy_tail_integral(z)?;
    let inner = spec.with_abs_tol(spec.abs_tol / 2.0);
    let integral = ratio_integral(c.value(), x, z, false, &inner)?;
    Ok(1.0 - tail - 2.0 * (rotation() * integral).re)
}

/// `F_c(x) = P(max_{t >= 0} {W(t) - c t^2} <= x)`.
pub fn cdf_one_sided(c: DriftCoefficient, x: f64, spec: &QuadratureSpec) -> Result<f64> {
    let raw = cdf_one_sided_raw(c, x, spec)?;
    clamp_cdf(x, raw)
}

fn clamp_cdf(x: f64, raw: f64) -> Result<f64> {
    if !(-CDF_SLACK..=1.0 + CDF_SLACK).contains(&raw) {
        return Err(Error::OutOfRange { x, value: raw });
    }
    Ok(raw.clamp(0.0, 1.0))
}

/// `f_c(x)` before clamping.
pub fn pdf_one_sided_raw(c: DriftCoefficient, x: f64, spec: &QuadratureSpec) -> Result<f64> {
    let z = ScaledArgument::new(c, x)?.value();
    if z > Z_SATURATION {
        return Ok(0.0);
    }
    let s = c.scale();
    let ai_z = airy_ai(Complex64::new(z, 0.0))?.value.re;
    let inner = spec.with_abs_tol(spec.abs_tol / (2.0 * s));
    let integral = ratio_integral(c.value(), x, z, true, &inner)?;
    Ok(s * (ai_z - 2.0 * (rotation() * integral).re))
}

/// Density `f_c(x)` of the one-sided maximum.
pub fn pdf_one_sided(c: DriftCoefficient, x: f64, spec: &QuadratureSpec) -> Result<f64> {
    let raw = pdf_one_sided_raw(c, x, spec)?;
    clamp_pdf(x, raw)
}

fn clamp_pdf(x: f64, raw: f64) -> Result<f64> {
    if raw < -PDF_FLOOR {
        return Err(Error::OutOfRange { x, value: raw });
    }
    Ok(raw.max(0.0))
}

/// `F_c(x)` from the Bi-form integral, returned as the complex value of
/// `1/2 int_{-U_BI}^{U_BI} ...`; the imaginary part is zero in exact arithmetic.
pub fn cdf_bi_form_raw(c: DriftCoefficient, x: f64, spec: &QuadratureSpec) -> Result<Complex64> {
    let z = ScaledArgument::new(c, x)?.value();
    // Past U_BI the integrand is below exp(-RAY_DECAY U^{3/2}) up to a
    // prefactor of order one; 0.9 shading absorbs it.
    let tail = DecayEnvelope::new(1.0, 0.9 * RAY_DECAY, 1.5, U_BI).tail_bound(U_BI);
    let spec = QuadratureSpec {
        abs_tol: spec.abs_tol.max(1e-9),
        ..*spec
    }
    .with_truncation(Truncation::Fixed {
        point: U_BI,
        tail_bound: tail,
    });
    let failure: Cell<Option<AiryError>> = Cell::new(None);
    let record = |e: AiryError| {
        let previous = failure.take();
        failure.set(previous.or(Some(e)));
        Complex64::new(f64::NAN, 0.0)
    };
    let integrand = |u: f64| {
        let axis = Complex64::new(0.0, u);
        let shifted = Complex64::new(z, u);
        let pieces = (|| -> std::result::Result<Complex64, AiryError> {
            let ai_axis = airy_ai(axis)?.value;
            let bi_axis = airy_bi(axis)?.value;
            let ai_shift = airy_ai(shifted)?.value;
            let bi_shift = airy_bi(shifted)?.value;
            Ok((ai_axis * bi_shift - bi_axis * ai_shift) / ai_axis)
        })();
        pieces.unwrap_or_else(record)
    };
    let outcome = integrate_real_line(integrand, &spec);
    if let Some(e) = failure.take() {
        return Err(Error::Airy(e));
    }
    let result = match outcome {
        Ok(r) => r,
        // The rounding noise of the cancellation keeps the estimate from
        // settling; the best value is still the answer this form can give.
        Err(QuadError::NotConverged { best }) | Err(QuadError::RoundoffLimited { best })
            if best.error_estimate < 1e-6 =>
        {
            best
        }
        Err(source) => {
            return Err(Error::Quadrature {
                c: c.value(),
                x,
                source,
            })
        }
    };
    Ok(result.value * 0.5)
}

/// Real part of [`cdf_bi_form_raw`].
pub fn cdf_bi_form(c: DriftCoefficient, x: f64, spec: &QuadratureSpec) -> Result<f64> {
    Ok(cdf_bi_form_raw(c, x, spec)?.re)
}

/// `F_M(x) = F_c(x)^2` for the two-sided maximum `M`.
pub fn cdf_two_sided(c: DriftCoefficient, x: f64, spec: &QuadratureSpec) -> Result<f64> {
    let f = cdf_one_sided(c, x, spec)?;
    Ok(f * f)
}

/// `g_c(x) = 2 f_c(x) F_c(x)`.
pub fn pdf_two_sided(c: DriftCoefficient, x: f64, spec: &QuadratureSpec) -> Result<f64> {
    let cdf = cdf_one_sided(c, x, spec)?;
    let pdf = pdf_one_sided(c, x, spec)?;
    Ok(2.0 * pdf * cdf)
}

pub fn cdf(c: DriftCoefficient, x: f64, side: Side, spec: &QuadratureSpec) -> Result<f64> {
    match side {
        Side::One => cdf_one_sided(c, x, spec),
        Side::Two => cdf_two_sided(c, x, spec),
    }
}

pub fn pdf(c: DriftCoefficient, x: f64, side: Side, spec: &QuadratureSpec) -> Result<f64> {
    match side {
        Side::One => pdf_one_sided(c, x, spec),
        Side::Two => pdf_two_sided(c, x, spec),
    }
}

/// Distribution function and density at `x`, sharing the one-sided values.
pub fn evaluate(c: DriftCoefficient, x: f64, side: Side, spec: &QuadratureSpec) -> Result<DistributionPoint> {
    let cdf1 = cdf_one_sided(c, x, spec)?;
    let pdf1 = pdf_one_sided(c, x, spec)?;
    Ok(match side {
        Side::One => DistributionPoint {
            x,
            cdf: cdf1,
            pdf: pdf1,
        },
        Side::Two => DistributionPoint {
            x,
            cdf: cdf1 * cdf1,
            pdf: 2.0 * pdf1 * cdf1,
        },
    })
}

/// [`evaluate`] over a batch of points, in parallel; output order follows `xs`.
pub fn evaluate_grid(
    c: DriftCoefficient,
    xs: &[f64],
    side: Side,
    spec: &QuadratureSpec,
) -> Result<Vec<DistributionPoint>> {
    xs.par_iter().map(|&x| evaluate(c, x, side, spec)).collect()
}

/// Envelope for `x^k` times either density:
/// `pdf(x) <= 4 s exp(-(2/3) (s x)^{3/2})`, the decay of `Ai(z)` with `s = (4c)^{1/3}`
/// (the true tail is faster). Half the rate pays for the power:
/// `x^k exp(-(r/2) x^{3/2}) <= (4k / 3r)^{2k/3} e^{-2k/3}`.
fn moment_envelope(c: DriftCoefficient, k: u32) -> DecayEnvelope {
    let s = c.scale();
    let rate = 2.0 / 3.0 * s.powf(1.5);
    let kf = f64::from(k);
    let power_bound = if k == 0 {
        1.0
    } else {
        (4.0 * kf / (3.0 * rate)).powf(2.0 * kf / 3.0) * (-2.0 * kf / 3.0).exp()
    };
    DecayEnvelope::new(4.0 * s * power_bound, rate / 2.0, 1.5, 0.0)
}

/// `int_0^inf x^k density(x) dx` by quadrature, with no shortcut at `k = 0`.
pub fn moment_integral(c: DriftCoefficient, k: u32, side: Side, spec: &QuadratureSpec) -> Result<f64> {
    if k > MAX_MOMENT_ORDER {
        return Err(Error::InvalidArgument(format!(
            "moment order {k} exceeds the cap {MAX_MOMENT_ORDER}"
        )));
    }
    let envelope = moment_envelope(c, k);
    let upper = envelope.truncation_point(spec.abs_tol / 10.0);
    let tail = envelope.tail_bound(upper);
    let kk = k as i32;
    let failure: Cell<Option<Error>> = Cell::new(None);
    let integrand = |x: f64| {
        let weight = x.powi(kk);
        // The weight multiplies the inner absolute error, so tighten it.
        let inner = spec.with_abs_tol(spec.abs_tol / (upper * weight.max(1.0)));
        match pdf(c, x, side, &inner) {
            Ok(v) => Complex64::new(weight * v, 0.0),
            Err(e) => {
                let previous = failure.take();
                failure.set(previous.or(Some(e)));
                Complex64::new(f64::NAN, 0.0)
            }
        }
    };
    let outer = spec.with_abs_tol(spec.abs_tol - tail);
    let outcome = integrate_interval(integrand, 0.0, upper, &outer);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let r = outcome.map_err(|source| Error::Quadrature {
        c: c.value(),
        x: upper,
        source,
    })?;
    Ok(r.value.re)
}

/// `E[N_c^k]` (one-sided) or `E[M^k]` (two-sided), `k <= 8`.
pub fn moment(c: DriftCoefficient, k: u32, side: Side, spec: &QuadratureSpec) -> Result<f64> {
    if k == 0 {
        return Ok(1.0);
    }
    moment_integral(c, k, side, spec)
}

/// Total mass of the computed density; 1 up to quadrature error.
pub fn total_probability(c: DriftCoefficient, side: Side, spec: &QuadratureSpec) -> Result<f64> {
    moment_integral(c, 0, side, spec)
}

/// Tolerance on `|cdf(x) - p|` met by [`quantile`].
pub const QUANTILE_TOL: f64 = 1e-8;

/// Smallest `x` with `cdf(x) = p`, by bracketing then Illinois regula falsi.
pub fn quantile(c: DriftCoefficient, p: f64, side: Side, spec: &QuadratureSpec) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "probability must lie in (0, 1), got {p}"
        )));
    }
    let g = |x: f64| cdf(c, x, side, spec).map(|v| v - p);

    let (mut lo, mut g_lo) = (0.0, g(0.0)?);
    if g_lo.abs() < QUANTILE_TOL / 2.0 {
        return Ok(0.0);
    }
    let mut hi = 1.0 / c.scale();
    let mut g_hi = g(hi)?;
    let mut doublings = 0;
    while g_hi < 0.0 {
        lo = hi;
        g_lo = g_hi;
        hi *= 2.0;
        g_hi = g(hi)?;
        doublings += 1;
        if doublings > 40 {
            return Err(Error::RootNotFound { p });
        }
    }

    let mut side_kept = 0i8;
    for _ in 0..200 {
        let x = (lo * g_hi - hi * g_lo) / (g_hi - g_lo);
        let x = if x > lo && x < hi { x } else { 0.5 * (lo + hi) };
        let gx = g(x)?;
        if gx.abs() < QUANTILE_TOL / 2.0 || hi - lo <= 1e-15 * hi.max(1.0) {
            return Ok(x);
        }
        if gx < 0.0 {
            lo = x;
            g_lo = gx;
            if side_kept == -1 {
                g_hi *= 0.5;
            }
            side_kept = -1;
        } else {
            hi = x;
            g_hi = gx;
            if side_kept == 1 {
                g_lo *= 0.5;
            }
            side_kept = 1;
        }
    }
    Err(Error::RootNotFound { p })
}

/// `int_0^inf Ai(u + z e^{-2 pi i/3}) du + int_0^inf Ai(u + z e^{2 pi i/3}) du`,
/// which equals `1 - int_z^inf Ai(u) du` for `z >= 0`.
///
/// For larger `z` the integrand grows to `exp((2/3)(z/2)^{3/2})` before it
/// decays, and the estimate can stall at the rounding floor; the stalled
/// estimate is returned with its honest error bound rather than an error.
pub fn rotated_integral_sum(z: f64, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    if z.is_nan() || z < 0.0 {
        return Err(Error::InvalidArgument(format!("z must be >= 0, got {z}")));
    }
    let minus = z * Complex64::from_polar(1.0, -2.0 * FRAC_PI_3);
    let plus = minus.conj();
    // Re(z e^{+-2 pi i/3}) = -z/2, so |Ai(u + w)| <~ exp((z/2) sqrt u - (2/3) u^{3/2})
    // <= exp((2/3)(z/2)^{3/2}) exp(-(1/3) u^{3/2}).
    let envelope = DecayEnvelope::new(
        2.0 * (2.0 / 3.0 * (z / 2.0).powf(1.5)).exp(),
        1.0 / 3.0,
        1.5,
        z,
    );
    let spec = spec.with_envelope(envelope);
    let outcome = with_airy_guard(f64::NAN, z, |ai| {
        integrate_semi_infinite(
            |u| match (ai(u + minus), ai(u + plus)) {
                (Some(a), Some(b)) => a.value + b.value,
                _ => Complex64::new(f64::NAN, 0.0),
            },
            &spec,
        )
    });
    match outcome {
        Err(Error::Quadrature {
            source: QuadError::RoundoffLimited { best },
            ..
        }) => Ok(best),
        other => other,
    }
}
