//! Density of the location `Z` of the maximum of `W(t) - t^2`, `t` in R.
//!
//! `f_Z(t) = phi(t) phi(-t) / 2` with
//!
//! ```text
//! phi(x) = 1 / (2^{2/3} pi) int_R e^{-iux} / Ai(i 2^{-1/3} u) du.
//! ```
//!
//! `1/Ai(i 2^{-1/3} u)` is analytic below `Im u = 2^{1/3} |a_1| ~ 2.946` (`a_1`
//! the first Airy zero), so the line may be moved to `u = v + i h`:
//!
//! ```text
//! phi(x) = e^{hx} / (2^{2/3} pi) * 2 Re int_0^inf e^{-ivx} / Ai(2^{-1/3}(iv - h)) dv.
//! ```
//!
//! For `x > 0` the line goes down to `h = -2x^2`, through the saddle of the
//! integrand, which removes both the oscillation and the cancellation that
//! otherwise cost `exp(-(2/3) x^3)` of relative accuracy. For `x < 0` the
//! line goes up, capped at `h = 2` to keep clear of the pole.
//!
//! `u_2(t) = exp((2/3) t^3) phi(t)` is the function with the tail
//! `c_1 exp(-(2/3)|t|^3 - c|t|)` as `t -> -inf`; the exponential factors cancel
//! in the product, so `f_Z(t) = u_2(t) u_2(-t) / 2` as well.

use num_complex::Complex64;
use rayon::prelude::*;
use std::cell::Cell;
use std::f64::consts::PI;

use crate::airy::airy_ai;
use crate::error::{AiryError, Error, QuadError, Result};
use crate::quad::{
    integrate_interval_real, integrate_real_line, DecayEnvelope, QuadratureSpec, Truncation,
};

/// Largest `|x|` at which `phi` is evaluated.
pub const PHI_DOMAIN: f64 = 6.0;

/// Highest the integration line is moved for negative `x`.
const MAX_UPWARD_SHIFT: f64 = 2.0;

/// `2^{-1/3}`
const CBRT_HALF: f64 = 0.7937005259840998;

/// `2^{2/3} pi`
const PHI_NORMALIZER: f64 = 4.986967483164005;

/// Constants of the left tail `u_2(t) ~ c_1 exp(-(2/3)|t|^3 - c|t|)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailConstants {
    pub c_tail: f64,
    pub c1_tail: f64,
}

impl TailConstants {
    /// Values at the four-digit precision they are usually quoted with:
    /// `c = 2^{1/3} |a_1|` and `c_1 = 2^{2/3} / Ai'(a_1)`.
    pub const QUOTED: TailConstants = TailConstants {
        c_tail: 2.9458,
        c1_tail: 2.2638,
    };
}

impl Default for TailConstants {
    fn default() -> Self {
        Self::QUOTED
    }
}

/// `phi` at `t` and `-t`, and the density they give.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChernoffPoint {
    pub t: f64,
    pub phi_plus: f64,
    pub phi_minus: f64,
    pub density: f64,
}

fn check_domain(x: f64) -> Result<()> {
    if x.is_nan() || x.abs() > PHI_DOMAIN {
        return Err(Error::InvalidArgument(format!(
            "argument must lie in [-{PHI_DOMAIN}, {PHI_DOMAIN}], got {x}"
        )));
    }
    Ok(())
}

fn shift_for(x: f64) -> f64 {
    if x > 0.0 {
        -2.0 * x * x
    } else {
        (2.0 * x * x).min(MAX_UPWARD_SHIFT)
    }
}

/// `e^{-ivx} / Ai(2^{-1/3}(iv - h))` and the decay rate of its modulus.
fn shifted_integrand(x: f64, h: f64, v: f64) -> std::result::Result<(Complex64, f64), AiryError> {
    let w = CBRT_HALF * Complex64::new(-h, v);
    let p = airy_ai(w)?;
    let phase = Complex64::from_polar(1.0, -v * x);
    // d/dv log|1/Ai(w)| = -Re(i 2^{-1/3} Ai'(w) / Ai(w))
    let rate = (Complex64::new(0.0, CBRT_HALF) * p.derivative / p.value).re;
    Ok((phase / p.value, rate))
}

/// Moves out along the line until the remaining integral is below `target`.
///
/// Past the first few units the decay rate of `|g|` only grows, so the tail
/// beyond `V` is at most `|g(V)| / rate(V)`.
fn truncation_for(x: f64, h: f64, target: f64) -> Result<Truncation> {
    let mut v = 4.0;
    loop {
        let (g, rate) = shifted_integrand(x, h, v)?;
        if rate > 0.0 {
            let bound = g.norm() / rate;
            if bound < target {
                return Ok(Truncation::Fixed {
                    point: v,
                    tail_bound: bound,
                });
            }
        }
        v += 1.0;
        if CBRT_HALF * Complex64::new(-h, v + 1.0).norm() > crate::airy::Z_MAX {
            return Err(Error::Quadrature {
                c: 1.0,
                x,
                source: QuadError::MissingTruncation,
            });
        }
    }
}

/// `phi(x)` for `|x| <= 6`.
pub fn phi(x: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_domain(x)?;
    let h = if x == 0.0 { 0.0 } else { shift_for(x) };
    let prefactor = 2.0 * (h * x).exp() / PHI_NORMALIZER;
    let abs_tol = spec.abs_tol / prefactor;
    let g0 = shifted_integrand(x, h, 0.0)?.0.norm();
    let target = 0.1 * abs_tol.min(spec.rel_tol * g0).max(f64::MIN_POSITIVE);
    let truncation = truncation_for(x, h, target)?;
    let Truncation::Fixed { point, tail_bound } = truncation else {
        unreachable!("truncation_for always returns a fixed point")
    };
    let mut inner = spec.with_abs_tol(abs_tol.max(2.0 * tail_bound));
    if x < 0.0 {
        // Keep panels within an eighth of the oscillation period.
        inner = inner.with_max_panel(PI / (4.0 * x.abs()));
    }
    let failure: Cell<Option<AiryError>> = Cell::new(None);
    let outcome = integrate_interval_real(
        |v| match shifted_integrand(x, h, v) {
            Ok((g, _)) => g.re,
            Err(e) => {
                let previous = failure.take();
                failure.set(previous.or(Some(e)));
                f64::NAN
            }
        },
        0.0,
        point,
        &inner,
    );
    if let Some(e) = failure.take() {
        return Err(Error::Airy(e));
    }
    let (integral, _) = outcome.map_err(|source| Error::Quadrature { c: 1.0, x, source })?;
    Ok(prefactor * integral)
}

/// `1/(2^{2/3} pi) int_R e^{-iux} / Ai(i 2^{-1/3} u) du` on the real line
/// itself, without the contour shift, returned as a complex number. Only
/// practical for moderate `|x|`; its imaginary part vanishes in exact arithmetic.
pub fn phi_full_line(x: f64, spec: &QuadratureSpec) -> Result<Complex64> {
    check_domain(x)?;
    // |1/Ai(iy)| ~ 2 sqrt(pi) y^{1/4} exp(-(sqrt 2/3) y^{3/2}) and y = 2^{-1/3} u
    // gives the rate 1/3 in u^{3/2}; shading it to 0.3 covers the prefactor.
    let envelope = DecayEnvelope::new(10.0, 0.3, 1.5, 4.0);
    let mut spec = spec
        .with_abs_tol(spec.abs_tol * PHI_NORMALIZER)
        .with_envelope(envelope);
    if x != 0.0 {
        spec = spec.with_max_panel(PI / (4.0 * x.abs()));
    }
    let failure: Cell<Option<AiryError>> = Cell::new(None);
    let outcome = integrate_real_line(
        |u| match airy_ai(Complex64::new(0.0, CBRT_HALF * u)) {
            Ok(p) => Complex64::from_polar(1.0, -u * x) / p.value,
            Err(e) => {
                let previous = failure.take();
                failure.set(previous.or(Some(e)));
                Complex64::new(f64::NAN, 0.0)
            }
        },
        &spec,
    );
    if let Some(e) = failure.take() {
        return Err(Error::Airy(e));
    }
    let r = outcome.map_err(|source| Error::Quadrature { c: 1.0, x, source })?;
    Ok(r.value / PHI_NORMALIZER)
}

/// `u_2(t) = exp((2/3) t^3) phi(t)`.
pub fn u2(t: f64, spec: &QuadratureSpec) -> Result<f64> {
    Ok((2.0 / 3.0 * t.powi(3)).exp() * phi(t, spec)?)
}

/// `c_1 exp(-(2/3)|t|^3 - c|t|)` for `t < 0`.
pub fn u2_asymptote(t: f64) -> Result<f64> {
    u2_asymptote_with(t, TailConstants::QUOTED)
}

pub fn u2_asymptote_with(t: f64, constants: TailConstants) -> Result<f64> {
    if t.is_nan() || t >= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "the tail asymptote holds as t -> -inf; t must be < 0, got {t}"
        )));
    }
    let s = t.abs();
    Ok(constants.c1_tail * (-2.0 / 3.0 * s.powi(3) - constants.c_tail * s).exp())
}

/// `f_Z(t) = phi(t) phi(-t) / 2`; both `t` and `-t` give bit-identical densities.
pub fn chernoff_density(t: f64, spec: &QuadratureSpec) -> Result<ChernoffPoint> {
    check_domain(t)?;
    let s = t.abs();
    let right = phi(s, spec)?;
    let left = if s == 0.0 { right } else { phi(-s, spec)? };
    let (phi_plus, phi_minus) = if t >= 0.0 { (right, left) } else { (left, right) };
    Ok(ChernoffPoint {
        t,
        phi_plus,
        phi_minus,
        density: 0.5 * right * left,
    })
}

/// [`chernoff_density`] over a batch of points, in parallel, in input order.
pub fn chernoff_grid(ts: &[f64], spec: &QuadratureSpec) -> Result<Vec<ChernoffPoint>> {
    ts.par_iter().map(|&t| chernoff_density(t, spec)).collect()
}

fn symmetric_integral(weight: impl Fn(f64) -> f64, spec: &QuadratureSpec) -> Result<f64> {
    let failure: Cell<Option<Error>> = Cell::new(None);
    let inner = spec.with_abs_tol(spec.abs_tol / (4.0 * PHI_DOMAIN * PHI_DOMAIN));
    let outcome = integrate_interval_real(
        |t| match chernoff_density(t, &inner) {
            Ok(p) => weight(t) * p.density,
            Err(e) => {
                let previous = failure.take();
                failure.set(previous.or(Some(e)));
                f64::NAN
            }
        },
        0.0,
        PHI_DOMAIN,
        &spec.with_abs_tol(spec.abs_tol / 2.0),
    );
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let (half, _) = outcome.map_err(|source| Error::Quadrature {
        c: 1.0,
        x: PHI_DOMAIN,
        source,
    })?;
    Ok(2.0 * half)
}

/// `int_{-6}^{6} f_Z`; the mass beyond is below `1e-30`.
pub fn total_mass(spec: &QuadratureSpec) -> Result<f64> {
    symmetric_integral(|_| 1.0, spec)
}

/// `E[Z^2]`; `E[Z] = 0` by symmetry.
pub fn second_moment(spec: &QuadratureSpec) -> Result<f64> {
    symmetric_integral(|t| t * t, spec)
}

pub fn standard_deviation(spec: &QuadratureSpec) -> Result<f64> {
    Ok(second_moment(spec)?.sqrt())
}

/// `f_Z` tabulated on `[-T, T]` with its distribution function, for
/// goodness-of-fit tests and plotting.
#[derive(Clone, Debug, PartialEq)]
pub struct ChernoffTable {
    step: f64,
    /// Density at `i * step`, `i = 0..=n`.
    density: Vec<f64>,
    /// `int_0^{i step} f_Z`.
    half_mass: Vec<f64>,
}

impl ChernoffTable {
    pub fn new(half_width: f64, step: f64, spec: &QuadratureSpec) -> Result<Self> {
        if !(step > 0.0) || !(half_width > 0.0) || half_width > PHI_DOMAIN {
            return Err(Error::InvalidArgument(format!(
                "table needs 0 < half_width <= {PHI_DOMAIN} and step > 0, got {half_width}, {step}"
            )));
        }
        let n = (half_width / step).round() as usize;
        let ts: Vec<f64> = (0..=n).map(|i| i as f64 * step).collect();
        let density: Vec<f64> = chernoff_grid(&ts, spec)?
            .into_iter()
            .map(|p| p.density)
            .collect();
        let mut half_mass = vec![0.0; n + 1];
        for i in 0..n {
            // Quadratic through the neighbours; f_Z is even, so f(-step) = f(step).
            let before = if i == 0 { density[1] } else { density[i - 1] };
            let piece = step / 12.0 * (-before + 8.0 * density[i] + 5.0 * density[i + 1]);
            half_mass[i + 1] = half_mass[i] + piece;
        }
        Ok(Self {
            step,
            density,
            half_mass,
        })
    }

    pub fn half_width(&self) -> f64 {
        self.step * (self.density.len() - 1) as f64
    }

    /// `f_Z(t)` by linear interpolation; zero outside the table.
    pub fn density(&self, t: f64) -> f64 {
        self.interpolate(&self.density, t.abs()).unwrap_or(0.0)
    }

    /// `P(Z <= t)`.
    pub fn cdf(&self, t: f64) -> f64 {
        let half = self
            .interpolate(&self.half_mass, t.abs())
            .unwrap_or(*self.half_mass.last().expect("table is nonempty"));
        if t >= 0.0 {
            (0.5 + half).min(1.0)
        } else {
            (0.5 - half).max(0.0)
        }
    }

    /// Mass of the table, `2 int_0^T f_Z`.
    pub fn mass(&self) -> f64 {
        2.0 * self.half_mass.last().expect("table is nonempty")
    }

    fn interpolate(&self, values: &[f64], s: f64) -> Option<f64> {
        let pos = s / self.step;
        let i = pos.floor() as usize;
        if i + 1 >= values.len() {
            return (i + 1 == values.len() && pos == i as f64).then(|| values[i]);
        }
        let frac = pos - i as f64;
        Some(values[i] + frac * (values[i + 1] - values[i]))
    }
}
