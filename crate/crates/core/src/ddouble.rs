//! Double-double arithmetic.
//!
//! A value is the unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`, giving
//! roughly 32 significant decimal digits. Only the handful of operations the
//! Airy power series needs are provided.

use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub(crate) struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };

    pub const fn new(hi: f64, lo: f64) -> Self {
        Self { hi, lo }
    }

    pub fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs_hi(self) -> f64 {
        self.hi.abs()
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let e = e + self.lo * b;
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }

    pub fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let (p1, p2) = two_prod(q1, b);
        let (s, e) = two_sum(self.hi, -p1);
        let e = e - p2 + self.lo;
        let q2 = (s + e) / b;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo }
    }
}

impl Add for DoubleDouble {
    type Output = Self;

    #[inline]
    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let e = e + t;
        let (s, e) = quick_two_sum(s, e);
        let e = e + f;
        let (hi, lo) = quick_two_sum(s, e);
        Self { hi, lo }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;

    #[inline]
    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;

    #[inline]
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;

    #[inline]
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }
}

/// Complex number with double-double components.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub(crate) struct ComplexDd {
    pub re: DoubleDouble,
    pub im: DoubleDouble,
}

impl ComplexDd {
    pub const ONE: Self = Self {
        re: DoubleDouble::ONE,
        im: DoubleDouble::ZERO,
    };

    pub fn from_complex(z: Complex64) -> Self {
        Self {
            re: DoubleDouble::from_f64(z.re),
            im: DoubleDouble::from_f64(z.im),
        }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    /// Cheap magnitude estimate from the leading parts.
    pub fn norm_hi(self) -> f64 {
        self.re.hi.hypot(self.im.hi)
    }

    pub fn scale(self, k: DoubleDouble) -> Self {
        Self {
            re: self.re * k,
            im: self.im * k,
        }
    }

    pub fn div_f64(self, b: f64) -> Self {
        Self {
            re: self.re.div_f64(b),
            im: self.im.div_f64(b),
        }
    }
}

impl Add for ComplexDd {
    type Output = Self;

    #[inline]
    fn add(self, b: Self) -> Self {
        Self {
            re: self.re + b.re,
            im: self.im + b.im,
        }
    }
}

impl Sub for ComplexDd {
    type Output = Self;

    #[inline]
    fn sub(self, b: Self) -> Self {
        Self {
            re: self.re - b.re,
            im: self.im - b.im,
        }
    }
}

impl Mul for ComplexDd {
    type Output = Self;

    #[inline]
    fn mul(self, b: Self) -> Self {
        Self {
            re: self.re * b.re - self.im * b.im,
            im: self.re * b.im + self.im * b.re,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn third_is_exact_to_double_double() {
        let third = DoubleDouble::ONE.div_f64(3.0);
        let back = third.mul_f64(3.0) - DoubleDouble::ONE;
        assert!(back.to_f64().abs() < 1e-31);
    }

    #[test]
    fn recovers_bits_lost_in_f64() {
        // 1 + 2^-60 is not representable in f64 but is in double-double.
        let tiny = 2f64.powi(-60);
        let x = DoubleDouble::ONE + DoubleDouble::from_f64(tiny);
        let y = x - DoubleDouble::ONE;
        assert_eq!(y.to_f64(), tiny);
    }

    #[test]
    fn complex_product_matches_f64_for_small_integers() {
        let a = ComplexDd::from_complex(Complex64::new(3.0, -2.0));
        let b = ComplexDd::from_complex(Complex64::new(-1.0, 5.0));
        assert_eq!((a * b).to_complex(), Complex64::new(7.0, 17.0));
    }
}
