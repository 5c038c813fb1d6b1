mod common;

use bmparab_core::parabola::*;
use bmparab_core::quad::{integrate_interval_real, QuadratureSpec};
use bmparab_core::Error;
use common::HALF_TABLE;
use proptest::prelude::*;

fn c(v: f64) -> DriftCoefficient {
    DriftCoefficient::new(v).unwrap()
}

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

#[test]
fn one_sided_matches_mpmath_table() {
    for &(x, f_ref, d_ref) in HALF_TABLE {
        let f = cdf_one_sided(c(0.5), x, &spec()).unwrap();
        let d = pdf_one_sided(c(0.5), x, &spec()).unwrap();
        assert!((f - f_ref).abs() < 1e-10, "x {x}: cdf {f} vs {f_ref}");
        assert!((d - d_ref).abs() < 1e-10, "x {x}: pdf {d} vs {d_ref}");
    }
}

#[test]
fn bi_form_agrees_with_ratio_form() {
    for &(x, f_ref, _) in HALF_TABLE {
        let raw = cdf_bi_form_raw(c(0.5), x, &spec()).unwrap();
        assert!((raw.re - f_ref).abs() < 1e-6, "x {x}: {raw}");
        assert!(raw.im.abs() < 1e-6, "x {x}: {raw}");
    }
}

#[test]
fn two_sided_is_square_of_one_sided() {
    for x in [0.3, 1.1, 2.4] {
        let f = cdf_one_sided(c(0.5), x, &spec()).unwrap();
        let d = pdf_one_sided(c(0.5), x, &spec()).unwrap();
        assert_eq!(cdf_two_sided(c(0.5), x, &spec()).unwrap(), f * f);
        assert_eq!(pdf_two_sided(c(0.5), x, &spec()).unwrap(), 2.0 * d * f);
    }
}

#[test]
fn rotated_integral_identity() {
    for z in [0.0, 0.5, 1.0, 2.0, 4.0] {
        let lhs = rotated_integral_sum(z, &spec()).unwrap().value;
        let rhs = 1.0 - bmparab_core::airy_tail_integral(z).unwrap();
        assert!((lhs.re - rhs).abs() < 1e-9 && lhs.im.abs() < 1e-9, "z {z}: {lhs} vs {rhs}");
    }
    let at_zero = rotated_integral_sum(0.0, &spec()).unwrap().value.re;
    assert!((at_zero - 2.0 / 3.0).abs() < 1e-12);
    let far = rotated_integral_sum(8.0, &spec()).unwrap();
    assert!((far.value.re - 1.0).abs() < 1e-6, "{far:?}");
}

#[test]
fn densities_integrate_to_one() {
    for side in [Side::One, Side::Two] {
        let mass = total_probability(c(0.5), side, &spec()).unwrap();
        assert!((mass - 1.0).abs() < 1e-6, "{side}: {mass}");
    }
}

#[test]
fn first_moment_is_integral_of_survival_function() {
    // E[N] = int_0^inf (1 - F(x)) dx; 1 - F(8) is below 1e-30 at c = 1/2.
    let qspec = QuadratureSpec::with_tolerances(1e-11, 1e-11);
    for side in [Side::One, Side::Two] {
        let (survival, _) = integrate_interval_real(
            |x| 1.0 - cdf(c(0.5), x, side, &spec()).unwrap(),
            0.0,
            8.0,
            &qspec,
        )
        .unwrap();
        let m1 = moment(c(0.5), 1, side, &spec()).unwrap();
        assert!((m1 - survival).abs() < 1e-8, "{side}: {m1} vs {survival}");
    }
}

#[test]
fn moments_scale_with_the_drift() {
    // N_c has the law of (4c)^{-1/3} N_{1/4}.
    for k in [1, 2, 3] {
        let base = moment(c(0.25), k, Side::Two, &spec()).unwrap();
        let other = moment(c(2.0), k, Side::Two, &spec()).unwrap();
        let factor = 8f64.powf(-(k as f64) / 3.0);
        assert!((other - factor * base).abs() < 1e-8 * base, "k {k}");
    }
}

#[test]
fn zeroth_moment_is_exactly_one() {
    assert_eq!(moment(c(0.5), 0, Side::Two, &spec()).unwrap(), 1.0);
    assert_eq!(moment(c(3.0), 0, Side::One, &spec()).unwrap(), 1.0);
}

#[test]
fn quantile_round_trip_and_small_p() {
    let p = cdf_one_sided(c(0.5), 1.0, &spec()).unwrap();
    let x = quantile(c(0.5), p, Side::One, &spec()).unwrap();
    assert!((x - 1.0).abs() < 1e-6);
    let tiny = quantile(c(0.5), 1e-6, Side::One, &spec()).unwrap();
    assert!(tiny > 0.0 && tiny < 1e-4, "{tiny}");
    let median = quantile(c(0.5), 0.5, Side::Two, &spec()).unwrap();
    assert!((cdf_two_sided(c(0.5), median, &spec()).unwrap() - 0.5).abs() < 1e-8);
}

#[test]
fn monotone_on_a_fine_grid() {
    let xs: Vec<f64> = (0..=300).map(|i| i as f64 * 0.01).collect();
    let points = evaluate_grid(c(0.5), &xs, Side::One, &spec()).unwrap();
    for w in points.windows(2) {
        assert!(w[1].cdf >= w[0].cdf, "at {}", w[1].x);
    }
    assert!(points.iter().all(|p| p.pdf >= 0.0));
}

#[test]
fn density_is_derivative_of_cdf() {
    let h = 1e-4;
    let mut x = 0.1;
    while x <= 3.0 {
        let fd = (cdf_one_sided(c(0.5), x + h, &spec()).unwrap()
            - cdf_one_sided(c(0.5), x - h, &spec()).unwrap())
            / (2.0 * h);
        let d = pdf_one_sided(c(0.5), x, &spec()).unwrap();
        assert!((fd - d).abs() < 1e-5, "x {x}: {fd} vs {d}");
        x += 0.1;
    }
}

#[test]
fn invalid_inputs() {
    assert!(matches!(
        cdf_two_sided(c(0.5), -1e-3, &spec()),
        Err(Error::InvalidArgument(_))
    ));
    assert!(matches!(
        quantile(c(0.5), 0.0, Side::Two, &spec()),
        Err(Error::InvalidArgument(_))
    ));
    assert!(DriftCoefficient::new(f64::NAN).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn scaling_collapse(cv in 0.05..5.0f64, x in 0.0..3.0f64) {
        let direct = cdf_one_sided(c(cv), x, &spec()).unwrap();
        let collapsed = cdf_one_sided(c(0.25), (4.0 * cv).cbrt() * x, &spec()).unwrap();
        prop_assert!((direct - collapsed).abs() < 1e-9);
    }

    #[test]
    fn cdf_is_monotone_and_bounded(cv in 0.1..3.0f64, x in 0.0..3.0f64, dx in 1e-3..1.0f64) {
        let a = cdf_one_sided(c(cv), x, &spec()).unwrap();
        let b = cdf_one_sided(c(cv), x + dx, &spec()).unwrap();
        prop_assert!((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b));
        prop_assert!(b >= a);
        prop_assert!(cdf_two_sided(c(cv), x, &spec()).unwrap() <= a);
    }

    #[test]
    fn quantile_inverts_cdf(p in 0.01..0.99f64) {
        for side in [Side::One, Side::Two] {
            let x = quantile(c(0.5), p, side, &spec()).unwrap();
            prop_assert!((cdf(c(0.5), x, side, &spec()).unwrap() - p).abs() < 1e-8);
        }
    }
}
