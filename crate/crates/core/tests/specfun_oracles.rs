use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use proptest::prelude::*;
use v2x_core::specfun::{
    bessel_i, bessel_i_scaled, gauss_2f1, gauss_2f1_pfaff, integrate, integrate_tail, struve_l,
    struve_m, QuadratureError, QuadratureSpec, SpecfunError,
};

/// Composite Simpson rule with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + k as f64 * h);
    }
    s * h / 3.0
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn bessel_matches_trapezoid_on_the_period() {
    // I_n(x) = (1/π) ∫_0^π e^{x cos θ} cos(nθ) dθ; the trapezoid rule is spectrally accurate here.
    for &x in &[0.5, 1.0, 4.0, 12.0, 25.0, 60.0] {
        for n in [0, 1] {
            let m = 400;
            let h = PI / m as f64;
            let g = |t: f64| (x * (t.cos() - 1.0)).exp() * (n as f64 * t).cos();
            let mut s = 0.5 * (g(0.0) + g(PI));
            for k in 1..m {
                s += g(k as f64 * h);
            }
            let scaled = s * h / PI;
            let got = bessel_i_scaled(n, x).unwrap();
            assert!(rel(got, scaled) < 1e-12, "n={n} x={x}: {got} vs {scaled}");
            if x < 700.0 {
                assert!(rel(bessel_i(n, x).unwrap(), scaled * x.exp()) < 1e-12);
            }
        }
    }
}

#[test]
fn bessel_i0_at_one() {
    // Σ 1/(4^k k!²)
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..30 {
        term /= 4.0 * (k * k) as f64;
        sum += term;
    }
    assert!(rel(bessel_i(0, 1.0).unwrap(), sum) < 1e-15);
}

#[test]
fn struve_l_matches_integral_representation() {
    // L_0(x) = (2/π) ∫_0^{π/2} sinh(x cos θ) dθ
    // L_{-1}(x) = (2/π) ∫_0^{π/2} cosh(x cos θ) cos θ dθ
    for &x in &[0.2, 2.0, 7.0, 15.0, 19.9, 20.1, 35.0] {
        let l0 = 2.0 / PI * simpson(|t| (x * t.cos()).sinh(), 0.0, FRAC_PI_2, 20_000);
        let lm1 = 2.0 / PI * simpson(|t| (x * t.cos()).cosh() * t.cos(), 0.0, FRAC_PI_2, 20_000);
        assert!(rel(struve_l(0, x).unwrap(), l0) < 1e-11, "L0({x})");
        assert!(rel(struve_l(-1, x).unwrap(), lm1) < 1e-11, "L-1({x})");
    }
}

#[test]
fn struve_m_is_the_difference_without_cancellation() {
    for &x in &[0.5, 3.0, 10.0, 18.0] {
        for order in [0, -1] {
            let direct = struve_l(order, x).unwrap() - bessel_i(order.abs(), x).unwrap();
            let m = struve_m(order, x).unwrap();
            assert!(
                (m - direct).abs() < 1e-12 * struve_l(order, x).unwrap().abs().max(1.0),
                "x={x} order={order}"
            );
        }
    }
    // large x: -M_0 ~ 2/(πx), M_{-1} ~ 2/(πx²)
    let x = 500.0;
    assert!(rel(-struve_m(0, x).unwrap(), 2.0 / (PI * x)) < 1e-5);
    assert!(rel(struve_m(-1, x).unwrap(), 2.0 / (PI * x * x)) < 1e-4);
}

fn hyper_oracle(b: f64, x: f64) -> f64 {
    // 2F1(1, b; b+1; -x) = ∫_0^1 du / (1 + x u^{1/b}), with u = v^4 to spread the peak at 0
    simpson(
        |v| 4.0 * v.powi(3) / (1.0 + x * v.powf(4.0 / b)),
        0.0,
        1.0,
        200_000,
    )
}

#[test]
fn hypergeometric_against_quadrature() {
    for &alpha in &[2.5, 3.0, 4.0, 5.5] {
        let b = (alpha - 1.0) / alpha;
        for &x in &[0.01, 0.4, 1.0, 3.0, 100.0, 1e4] {
            let oracle = hyper_oracle(b, x);
            let v = gauss_2f1(1.0, b, b + 1.0, -x).unwrap();
            assert!(
                rel(v, oracle) < 1e-9,
                "alpha={alpha} x={x}: {v} vs {oracle}"
            );
        }
    }
}

#[test]
fn hypergeometric_routes_agree() {
    for &z in &[-0.7, -1.0, -5.0, -100.0] {
        let a = gauss_2f1(1.0, 0.75, 1.75, z).unwrap();
        let b = gauss_2f1_pfaff(1.0, 0.75, 1.75, z).unwrap();
        assert!(rel(a, b) < 1e-12, "z={z}: {a} vs {b}");
    }
}

#[test]
fn quadrature_standard_integrals() {
    let q = QuadratureSpec::default().tightened(100.0);
    type Case<'a> = (&'a dyn Fn(f64) -> f64, f64, f64, f64);
    let cases: [Case; 4] = [
        (&|t: f64| 1.0 / (1.0 + t * t), 0.0, f64::INFINITY, FRAC_PI_2),
        (&|t: f64| (-t).exp(), 0.0, f64::INFINITY, 1.0),
        (
            &|t: f64| (-t * t).exp(),
            0.0,
            f64::INFINITY,
            PI.sqrt() / 2.0,
        ),
        (
            &|t: f64| 1.0 / (1.0 + t.powi(4)),
            0.0,
            f64::INFINITY,
            PI / (2.0 * SQRT_2),
        ),
    ];
    for (f, a, b, exact) in cases {
        assert!(rel(integrate(f, a, b, &q).unwrap(), exact) < 1e-10);
    }
    let tail = integrate_tail(|t: f64| 1.0 / (t * t), 3.0, 3.0, &q).unwrap();
    assert!(rel(tail, 1.0 / 3.0) < 1e-10);
    assert!(rel(integrate(|t: f64| t.sin(), PI, 0.0, &q).unwrap(), -2.0) < 1e-12);
}

#[test]
fn quadrature_reports_failures() {
    let q = QuadratureSpec::default();
    assert!(matches!(
        integrate(|t: f64| 1.0 / t, 0.0, 1.0, &q),
        Err(QuadratureError::NonConvergence { .. } | QuadratureError::NonFinite { .. })
    ));
    assert!(matches!(
        integrate(|t: f64| t, f64::NAN, 1.0, &q),
        Err(QuadratureError::InvalidBounds { .. })
    ));
    let bad = QuadratureSpec {
        abs_tol: -1.0,
        ..QuadratureSpec::default()
    };
    assert!(integrate(|t: f64| t, 0.0, 1.0, &bad).is_err());
}

#[test]
fn domain_errors_are_named() {
    assert!(matches!(
        bessel_i(3, 1.0),
        Err(SpecfunError::Domain {
            function: "bessel_i",
            ..
        })
    ));
    assert!(matches!(
        struve_m(0, -1.0),
        Err(SpecfunError::Domain {
            function: "struve_m",
            ..
        })
    ));
    assert!(matches!(
        gauss_2f1(1.0, 0.5, 1.5, 2.0),
        Err(SpecfunError::Domain { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bessel_is_positive_and_increasing(x in 0.01f64..600.0, dx in 0.01f64..5.0) {
        let a = bessel_i(0, x).unwrap();
        let b = bessel_i(0, x + dx).unwrap();
        prop_assert!(a > 0.0 && b > a);
        prop_assert!(bessel_i(1, x).unwrap() < a);
    }

    #[test]
    fn struve_differences_are_bounded(x in 0.0f64..1e4) {
        let d0 = -struve_m(0, x).unwrap();
        let d1 = struve_m(-1, x).unwrap();
        prop_assert!(d0 > 0.0 && d0 <= 1.0 + 1e-12);
        prop_assert!(d1 > 0.0 && d1 <= 2.0 / PI + 1e-12);
    }

    #[test]
    fn hypergeometric_branches_agree(b in 0.5f64..0.95, x in 0.0f64..60.0) {
        let a = gauss_2f1(1.0, b, b + 1.0, -x).unwrap();
        let p = gauss_2f1_pfaff(1.0, b, b + 1.0, -x).unwrap();
        prop_assert!(((a - p) / p).abs() < 1e-10);
        prop_assert!(a > 0.0 && a <= 1.0);
    }

    #[test]
    fn quadrature_is_additive(a in -5.0f64..5.0, w1 in 0.1f64..5.0, w2 in 0.1f64..5.0) {
        let q = QuadratureSpec::default().tightened(100.0);
        let f = |t: f64| (0.3 * t).cos() * (-0.1 * t * t).exp();
        let whole = integrate(f, a, a + w1 + w2, &q).unwrap();
        let parts = integrate(f, a, a + w1, &q).unwrap() + integrate(f, a + w1, a + w1 + w2, &q).unwrap();
        prop_assert!((whole - parts).abs() < 1e-11);
    }
}
