//! Airy functions of complex argument.
//!
//! `Ai` and `Ai'` are computed by one of two methods depending on `|z|`:
//!
//! * `|z| <= SERIES_RADIUS`: the Maclaurin series, summed in double-double
//!   arithmetic. Where `Ai` is recessive the series cancels down to
//!   `exp(-4/3 |z|^{3/2})` of its largest term; the extra precision absorbs that
//!   loss across the whole disk.
//! * `|z| > SERIES_RADIUS`: the large-argument expansion in
//!   `zeta = 2/3 z^{3/2}`, used directly for `|arg z| <= 2 pi / 3` and through
//!   `Ai(z) = -w Ai(w z) - w^2 Ai(w^2 z)`, `w = exp(2 pi i / 3)`, beyond that.
//!
//! All fractional powers use the principal branch, `arg z` in `(-pi, pi]`.
//! They only ever appear inside `|arg z| <= 2 pi / 3`, so the branch cut is
//! never approached.
//!
//! `Bi` is not computed independently. It is assembled from two `Ai`
//! evaluations through `Bi(z) = i Ai(z) - 2 i e^{i pi/3} Ai(z e^{-2 pi i/3})`.

use num_complex::Complex64;
use std::f64::consts::FRAC_PI_3;

use crate::ddouble::{ComplexDd, DoubleDouble};
use crate::error::AiryError;
use crate::quad;

/// Largest supported `|z|`.
pub const Z_MAX: f64 = 128.0;

/// Radius of the disk on which the power series is used.
pub const SERIES_RADIUS: f64 = 9.0;

/// `Ai(0) = 3^{-2/3} / Gamma(2/3)` in double-double.
const AI_AT_ZERO: DoubleDouble = DoubleDouble::new(0.3550280538878172, 2.05233632436212e-17);
/// `-Ai'(0) = 3^{-1/3} / Gamma(1/3)` in double-double.
const NEG_AIP_AT_ZERO: DoubleDouble =
    DoubleDouble::new(0.2588194037928068, -2.522243111610832e-17);

/// `2 sqrt(pi)`
const TWO_SQRT_PI: f64 = 3.5449077018110318;

/// Exponent beyond which `exp(-zeta)` is treated as underflowing to zero.
const UNDERFLOW_EXPONENT: f64 = 700.0;

/// Value and first derivative of an Airy function at one point.
///
/// `underflow` is set when the true value is below the double-precision
/// range and both components were returned as exact zeros.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AiryPair {
    pub value: Complex64,
    pub derivative: Complex64,
    pub underflow: bool,
}

impl AiryPair {
    const UNDERFLOWED: AiryPair = AiryPair {
        value: Complex64::new(0.0, 0.0),
        derivative: Complex64::new(0.0, 0.0),
        underflow: true,
    };
}

fn omega() -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * FRAC_PI_3)
}

fn check_argument(z: Complex64) -> Result<(), AiryError> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(AiryError::NonFinite(z));
    }
    let modulus = z.norm();
    if modulus > Z_MAX {
        return Err(AiryError::DomainOverflow {
            modulus,
            max: Z_MAX,
        });
    }
    Ok(())
}

/// `Ai(z)` and `Ai'(z)`.
pub fn airy_ai(z: Complex64) -> Result<AiryPair, AiryError> {
    check_argument(z)?;
    if z.im < 0.0 {
        // Ai(conj z) = conj Ai(z); evaluating in the upper half-plane only
        // makes the symmetry exact.
        let p = airy_ai_upper(z.conj())?;
        return Ok(AiryPair {
            value: p.value.conj(),
            derivative: p.derivative.conj(),
            underflow: p.underflow,
        });
    }
    airy_ai_upper(z)
}

fn airy_ai_upper(z: Complex64) -> Result<AiryPair, AiryError> {
    if z.norm() <= SERIES_RADIUS {
        return Ok(maclaurin(z));
    }
    if z.arg().abs() <= 2.0 * FRAC_PI_3 {
        return asymptotic(z);
    }
    let w = omega();
    let w2 = w * w;
    let a = asymptotic(w * z)?;
    let b = asymptotic(w2 * z)?;
    let mut value = -(w * a.value) - w2 * b.value;
    let mut derivative = -(w2 * a.derivative) - w * b.derivative;
    if z.im == 0.0 {
        // Real on the real axis; drop the rounding residue of the connection.
        value.im = 0.0;
        derivative.im = 0.0;
    }
    Ok(AiryPair {
        value,
        derivative,
        underflow: a.underflow && b.underflow,
    })
}

/// `Ai(x)` for real `x`.
pub fn airy_ai_real(x: f64) -> Result<f64, AiryError> {
    Ok(airy_ai(Complex64::new(x, 0.0))?.value.re)
}

/// `Bi(z)` and `Bi'(z)` through the connection formula.
pub fn airy_bi(z: Complex64) -> Result<AiryPair, AiryError> {
    let i = Complex64::i();
    let rotated = airy_ai(z * Complex64::from_polar(1.0, -2.0 * FRAC_PI_3))?;
    let direct = airy_ai(z)?;
    // d/dz Ai(z e^{-2 pi i/3}) = e^{-2 pi i/3} Ai'(z e^{-2 pi i/3})
    let k = -2.0 * i * Complex64::from_polar(1.0, FRAC_PI_3);
    let k_prime = k * Complex64::from_polar(1.0, -2.0 * FRAC_PI_3);
    Ok(AiryPair {
        value: i * direct.value + k * rotated.value,
        derivative: i * direct.derivative + k_prime * rotated.derivative,
        underflow: direct.underflow && rotated.underflow,
    })
}

/// `|e^{-2 pi i/3} Ai(z e^{-2 pi i/3}) + e^{2 pi i/3} Ai(z e^{2 pi i/3}) + Ai(z)|`,
/// which vanishes identically.
pub fn rotation_identity_residual(z: Complex64) -> Result<f64, AiryError> {
    let w = omega();
    let wc = w.conj();
    let minus = airy_ai(z * wc)?.value;
    let plus = airy_ai(z * w)?.value;
    let centre = airy_ai(z)?.value;
    Ok((wc * minus + w * plus + centre).norm())
}

/// `int_a^inf Ai(u) du` for `a >= 0`.
pub fn airy_tail_integral(a: f64) -> Result<f64, AiryError> {
    if a.is_nan() || a < 0.0 {
        return Err(AiryError::NegativeTailStart(a));
    }
    if a <= SERIES_RADIUS {
        return Ok(tail_by_series(a));
    }
    if a >= Z_MAX - 1.0 {
        // Below exp(-900).
        return Ok(0.0);
    }
    tail_by_panels(a)
}

/// Power series `Ai = c1 f - c2 g`, `Ai' = c1 f' - c2 g'` in double-double.
fn maclaurin(z: Complex64) -> AiryPair {
    let zd = ComplexDd::from_complex(z);
    let z3 = zd * zd * zd;

    let mut f_term = ComplexDd::ONE;
    let mut g_term = zd;
    let mut fp_term = (zd * zd).div_f64(2.0);
    let mut gp_term = ComplexDd::ONE;
    let mut f = f_term;
    let mut g = g_term;
    let mut fp = fp_term;
    let mut gp = gp_term;

    for k in 0..400u32 {
        let k3 = 3.0 * f64::from(k);
        f_term = (f_term * z3).div_f64((k3 + 2.0) * (k3 + 3.0));
        g_term = (g_term * z3).div_f64((k3 + 3.0) * (k3 + 4.0));
        fp_term = (fp_term * z3).div_f64((k3 + 3.0) * (k3 + 5.0));
        gp_term = (gp_term * z3).div_f64((k3 + 1.0) * (k3 + 3.0));
        f = f + f_term;
        g = g + g_term;
        fp = fp + fp_term;
        gp = gp + gp_term;

        let largest_term = f_term
            .norm_hi()
            .max(g_term.norm_hi())
            .max(fp_term.norm_hi())
            .max(gp_term.norm_hi());
        let scale = f.norm_hi().max(g.norm_hi()).max(fp.norm_hi()).max(gp.norm_hi());
        if largest_term <= 1e-34 * scale {
            break;
        }
    }

    let value = f.scale(AI_AT_ZERO) - g.scale(NEG_AIP_AT_ZERO);
    let derivative = fp.scale(AI_AT_ZERO) - gp.scale(NEG_AIP_AT_ZERO);
    AiryPair {
        value: value.to_complex(),
        derivative: derivative.to_complex(),
        underflow: false,
    }
}

/// Large-argument expansion, valid for `|arg z| <= 2 pi / 3`.
fn asymptotic(z: Complex64) -> Result<AiryPair, AiryError> {
    let sqrt_z = z.sqrt();
    let zeta = z * sqrt_z * (2.0 / 3.0);
    if -zeta.re < -UNDERFLOW_EXPONENT {
        return Ok(AiryPair::UNDERFLOWED);
    }
    if -zeta.re > UNDERFLOW_EXPONENT {
        return Err(AiryError::Overflow(z));
    }
    let quarter = sqrt_z.sqrt();

    let step = -1.0 / zeta;
    let mut power = Complex64::new(1.0, 0.0);
    let mut u = 1.0_f64;
    let mut sum_value = Complex64::new(1.0, 0.0);
    let mut sum_derivative = Complex64::new(1.0, 0.0);
    let mut previous = f64::INFINITY;
    for k in 1..200u32 {
        let kf = f64::from(k);
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
            / ((2.0 * kf - 1.0) * 216.0 * kf);
        let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
        power *= step;
        let term_value = power * u;
        let term_derivative = power * v;
        let size = term_value.norm().max(term_derivative.norm());
        if size > previous {
            // Past the smallest term; the expansion starts to diverge.
            break;
        }
        sum_value += term_value;
        sum_derivative += term_derivative;
        previous = size;
        if size <= 1e-17 * sum_value.norm().min(sum_derivative.norm()) {
            break;
        }
    }

    let decay = (-zeta).exp();
    Ok(AiryPair {
        value: decay * sum_value / (TWO_SQRT_PI * quarter),
        derivative: -(quarter * decay * sum_derivative) / TWO_SQRT_PI,
        underflow: false,
    })
}

/// `1/3 - int_0^a Ai`, integrating the power series term by term.
fn tail_by_series(a: f64) -> f64 {
    let x = DoubleDouble::from_f64(a);
    let x3 = x * x * x;
    // f = sum f_k, g = sum g_k; int_0^a f = a sum f_k / (3k+1), int_0^a g = a sum g_k / (3k+2)
    let mut f_term = DoubleDouble::ONE;
    let mut g_term = x;
    let mut int_f = DoubleDouble::ONE;
    let mut int_g = g_term.div_f64(2.0);
    for k in 0..400u32 {
        let k3 = 3.0 * f64::from(k);
        f_term = (f_term * x3).div_f64((k3 + 2.0) * (k3 + 3.0));
        g_term = (g_term * x3).div_f64((k3 + 3.0) * (k3 + 4.0));
        let fi = f_term.div_f64(k3 + 4.0);
        let gi = g_term.div_f64(k3 + 5.0);
        int_f = int_f + fi;
        int_g = int_g + gi;
        if fi.abs_hi().max(gi.abs_hi()) <= 1e-34 * int_f.abs_hi().max(int_g.abs_hi()) {
            break;
        }
    }
    let head = (int_f * AI_AT_ZERO - int_g * NEG_AIP_AT_ZERO).mul_f64(a);
    let third = DoubleDouble::ONE.div_f64(3.0);
    (third - head).to_f64().max(0.0)
}

/// Unit-width Gauss-Kronrod panels out to where the remaining mass is negligible.
fn tail_by_panels(a: f64) -> Result<f64, AiryError> {
    let mut total = 0.0;
    let mut left = a;
    while left < Z_MAX - 1.0 {
        let right = (left + 1.0).min(Z_MAX - 1.0);
        let mut failure = None;
        let panel = quad::kronrod_panel(
            &mut |u| match airy_ai(Complex64::new(u, 0.0)) {
                Ok(p) => p.value,
                Err(e) => {
                    failure.get_or_insert(e);
                    Complex64::new(f64::NAN, 0.0)
                }
            },
            left,
            right,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        let piece = panel.map(|p| p.value.re).unwrap_or(f64::NAN);
        total += piece;
        // Ai(u) decays faster than exp(-sqrt(a) (u - a)); the rest is below 1e-18 of the sum.
        if piece <= 1e-18 * total {
            break;
        }
        left = right;
    }
    Ok(total)
}
