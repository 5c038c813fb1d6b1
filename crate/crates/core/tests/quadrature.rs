use bmparab_core::quad::{
    integrate_interval, integrate_real_line, integrate_semi_infinite, DecayEnvelope,
    QuadratureSpec, Truncation,
};
use bmparab_core::{Complex64, QuadError};
use proptest::prelude::*;
use std::f64::consts::PI;

#[test]
fn lorentzian_with_fixed_cut() {
    let tail = 1e-12;
    let spec = QuadratureSpec::default().with_truncation(Truncation::Fixed {
        point: 1.0 / tail,
        tail_bound: tail,
    });
    let r = integrate_real_line(|u| Complex64::new(1.0 / (1.0 + u * u), 0.0), &spec).unwrap();
    assert!((r.value.re - PI).abs() < 1e-10, "{}", r.value);
}

#[test]
fn oscillatory_gaussian_fourier_transform() {
    // int e^{-u^2/2} e^{-iux} du = sqrt(2 pi) e^{-x^2/2}
    let x = 3.0;
    let spec = QuadratureSpec::with_tolerances(1e-12, 1e-12)
        .with_envelope(DecayEnvelope::new(1.0, 0.5, 2.0, 0.0))
        .with_max_panel(PI / (4.0 * x));
    let r = integrate_real_line(|u| Complex64::from_polar((-u * u / 2.0).exp(), -u * x), &spec)
        .unwrap();
    let exact = (2.0 * PI).sqrt() * (-x * x / 2.0).exp();
    assert!((r.value.re - exact).abs() < 1e-12);
    assert!(r.value.im.abs() < 1e-12);
}

#[test]
fn complex_exponential_on_half_line() {
    // int_0^inf e^{-(1-i)u} du = 1/(1-i)
    let spec = QuadratureSpec::with_tolerances(1e-12, 1e-12)
        .with_envelope(DecayEnvelope::new(1.0, 1.0, 1.0, 0.0));
    let r = integrate_semi_infinite(|u| (Complex64::new(-1.0, 1.0) * u).exp(), &spec).unwrap();
    let exact = Complex64::new(1.0, 0.0) / Complex64::new(1.0, -1.0);
    assert!((r.value - exact).norm() < 1e-12);
    assert!(r.error_estimate < 1e-11);
}

#[test]
fn reported_error_covers_the_truth() {
    let spec = QuadratureSpec::with_tolerances(1e-6, 1e-6);
    let r = integrate_interval(|u| Complex64::new(u.sqrt(), 0.0), 0.0, 1.0, &spec).unwrap();
    assert!((r.value.re - 2.0 / 3.0).abs() <= r.error_estimate);
}

#[test]
fn semi_infinite_without_rule_fails() {
    let r = integrate_semi_infinite(|_| Complex64::new(1.0, 0.0), &QuadratureSpec::default());
    assert_eq!(r.unwrap_err(), QuadError::MissingTruncation);
}

proptest! {
    #[test]
    fn polynomials_of_degree_up_to_21_are_exact(coeffs in prop::collection::vec(-1.0..1.0f64, 1..22), b in 0.1..3.0f64) {
        let spec = QuadratureSpec::default();
        let r = integrate_interval(
            |u| Complex64::new(coeffs.iter().rev().fold(0.0, |acc, c| acc * u + c), 0.0),
            0.0, b, &spec,
        ).unwrap();
        let exact: f64 = coeffs.iter().enumerate().map(|(k, c)| c * b.powi(k as i32 + 1) / (k as f64 + 1.0)).sum();
        prop_assert!((r.value.re - exact).abs() < 1e-12 * (1.0 + b.powi(coeffs.len() as i32)));
    }

    #[test]
    fn linear_in_the_integrand(a in -3.0..3.0f64, s in 0.5..4.0f64) {
        let spec = QuadratureSpec::with_tolerances(1e-13, 1e-13)
            .with_envelope(DecayEnvelope::new(1.0, 1.0 / (s * s), 2.0, 0.0));
        let f = |u: f64| Complex64::new((-(u / s).powi(2)).exp(), 0.0);
        let one = integrate_real_line(f, &spec).unwrap().value;
        let scaled = integrate_real_line(|u| f(u) * a, &spec.with_abs_tol(1e-13 * a.abs().max(1e-3))).unwrap().value;
        prop_assert!((scaled - one * a).norm() < 1e-11);
        prop_assert!((one.re - s * PI.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn truncation_point_bounds_tail(rate in 0.1..3.0f64, p in 1.0..2.5f64, target in 1e-14..1e-3f64) {
        let env = DecayEnvelope::new(1.0, rate, p, 0.0);
        let u = env.truncation_point(target);
        prop_assert!(env.tail_bound(u) <= target * (1.0 + 1e-9));
    }
}
