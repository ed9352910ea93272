use std::f64::consts::PI;

use proptest::prelude::*;
use v2x_core::analytic::*;
use v2x_core::pointprocess::{Bias, NetworkParams};
use v2x_core::specfun::{integrate, integrate_tail, QuadratureSpec};

fn params(lambda_r: f64, mu_v: f64, lambda_b: f64) -> NetworkParams {
    NetworkParams {
        lambda_r,
        mu_v,
        lambda_b,
        bias: Bias::Finite(1.0),
        p_v: 1000.0,
        alpha_v: 4.0,
        alpha_b: 4.0,
        sigma2: 10f64.powf(-10.4),
        p_tx: 1.0,
        z: 1.0,
    }
}

fn fig4() -> NetworkParams {
    params(0.001, 0.1, 2e-5)
}

fn fig3() -> NetworkParams {
    params(0.005, 0.001, 2e-5)
}

fn tight() -> QuadratureSpec {
    QuadratureSpec {
        abs_tol: 1e-15,
        rel_tol: 1e-13,
        max_subdivisions: 4000,
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn cdf_is_a_distribution() {
    for p in [fig3(), fig4(), params(0.1, 1.0, 1e-3)] {
        let m = Model::new(p, 500.0).unwrap();
        let median = m.v2v_quantile(0.5).unwrap();
        assert!((m.v2v_cdf(median).unwrap() - 0.5).abs() < 1e-8);
        let mut prev = 0.0;
        for k in 1..=60 {
            let r = median * k as f64 / 10.0;
            let c = m.v2v_cdf(r).unwrap();
            assert!(c >= prev && c <= 1.0);
            prev = c;
        }
        assert!(m.v2v_cdf(200.0 * median).unwrap() > 1.0 - 1e-12);
        let mass = integrate_tail(
            |r| m.v2v_pdf(r).unwrap(),
            0.0,
            median,
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert!((mass - 1.0).abs() < 1e-7, "pdf mass {mass}");
    }
}

#[test]
fn cdf_is_the_void_probability_of_the_disc() {
    // Independent route: straight y-integral of the chord void probability.
    let p = fig3();
    let m = Model::new(p, 500.0).unwrap();
    for &r in &[5.0, 60.0, 150.0] {
        let chord = integrate(
            |y: f64| 1.0 - (-2.0 * p.mu_v * (r * r - y * y).max(0.0).sqrt()).exp(),
            0.0,
            r,
            &tight(),
        )
        .unwrap();
        let ccdf = (-2.0 * PI * p.lambda_r * chord - 2.0 * p.mu_v * r).exp();
        assert!(rel(1.0 - m.v2v_cdf(r).unwrap(), ccdf) < 1e-9);
    }
}

#[test]
fn pdf_is_the_derivative_of_the_cdf() {
    for p in [fig3(), fig4()] {
        let m = Model::new(p, 500.0).unwrap();
        let median = m.v2v_quantile(0.5).unwrap();
        let q = tight();
        for k in 1..=40 {
            let r = median * k as f64 / 10.0;
            let h = 1e-3 * median;
            let fd = (m.v2v_cdf_with(r + h, &q).unwrap() - m.v2v_cdf_with(r - h, &q).unwrap())
                / (2.0 * h);
            let pdf = m.v2v_pdf(r).unwrap();
            assert!(rel(pdf, fd) < 1e-5, "r={r}: {pdf} vs {fd}");
        }
    }
}

#[test]
fn v2b_pdf_integrates_to_one() {
    let lb = 2e-5;
    let mass = integrate(
        |r| v2b_pdf(r, lb).unwrap(),
        0.0,
        f64::INFINITY,
        &QuadratureSpec::default(),
    )
    .unwrap();
    assert!((mass - 1.0).abs() < 1e-8);
}

#[test]
fn association_probabilities_are_complementary() {
    for mu in [1e-3, 5e-3, 0.05, 0.5] {
        for b in [0.01, 1.0, 100.0] {
            let p = NetworkParams {
                bias: Bias::Finite(b),
                ..params(0.005, mu, 2e-5)
            };
            let m = Model::new(p, 500.0).unwrap();
            let sum = m.assoc_v2v().unwrap() + m.assoc_v2b().unwrap();
            assert!((sum - 1.0).abs() < 1e-6, "mu={mu} B={b}: {sum}");
        }
    }
}

#[test]
fn v2b_association_is_the_vehicle_void_probability() {
    let p = NetworkParams {
        bias: Bias::Finite(10.0),
        alpha_v: 3.5,
        ..fig3()
    };
    let m = Model::new(p, 500.0).unwrap();
    for &rb in &[0.0f64, 10.0, 80.0, 300.0] {
        let rho = 10f64.powf(1.0 / 3.5) * rb.powf(4.0 / 3.5);
        let expect = 1.0 - m.v2v_cdf(rho).unwrap();
        assert!((m.assoc_v2b_given_rb(rb).unwrap() - expect).abs() < 1e-10);
    }
}

#[test]
fn association_grows_with_bias_and_vehicle_density() {
    let mut prev = 0.0;
    for b in [0.01, 0.1, 1.0, 10.0, 100.0] {
        let p = NetworkParams {
            bias: Bias::Finite(b),
            ..params(0.005, 0.005, 2e-5)
        };
        let a = Model::new(p, 500.0).unwrap().assoc_v2v().unwrap();
        assert!(a >= prev);
        prev = a;
    }
    let mut prev = 0.0;
    for mu in [1e-3, 3e-3, 1e-2, 3e-2, 0.1] {
        let a = Model::new(params(0.005, mu, 2e-5), 500.0)
            .unwrap()
            .assoc_v2v()
            .unwrap();
        assert!(a >= prev);
        prev = a;
    }
}

#[test]
fn success_at_zero_threshold_is_the_association_sum() {
    let m = Model::new(fig4(), 500.0).unwrap();
    let b = m.success_v2x(0.0).unwrap();
    assert!((b.p_v2x - (b.p_v2v_assoc + b.p_v2b_assoc)).abs() < 1e-7);
    assert!((b.p_v2v_only - 1.0).abs() < 1e-7);
}

#[test]
fn success_falls_with_threshold_and_noise() {
    let m = Model::new(fig4(), 500.0).unwrap();
    let mut prev = 1.0;
    for db in [-10.0, 0.0, 10.0, 20.0] {
        let z = 10f64.powf(db / 10.0);
        let b = m.success_v2x(z).unwrap();
        assert!(b.p_v2x <= prev);
        assert!(b.p_v2x + 1e-9 >= b.p_v2v_only);
        prev = b.p_v2x;
    }
    let noisy = Model::new(
        NetworkParams {
            sigma2: 1e-5,
            ..fig4()
        },
        500.0,
    )
    .unwrap();
    for &r in &[1.0, 5.0, 20.0] {
        assert!(
            noisy.success_v2v_given_r(1.0, r).unwrap() < m.success_v2v_given_r(1.0, r).unwrap()
        );
    }
}

#[test]
fn v2v_only_ignores_base_stations_and_bias() {
    let base = Model::new(params(0.005, 0.005, 2e-5), 2000.0)
        .unwrap()
        .success_v2v_only(1.0)
        .unwrap();
    for lb in [1e-6, 1e-4, 1e-3] {
        for b in [Bias::Finite(0.01), Bias::Infinite] {
            let p = NetworkParams {
                bias: b,
                ..params(0.005, 0.005, lb)
            };
            let v = Model::new(p, 2000.0)
                .unwrap()
                .success_v2v_only(1.0)
                .unwrap();
            assert!((v - base).abs() < 1e-12);
        }
    }
}

#[test]
fn origin_road_forms_agree_on_a_grid() {
    let q = tight();
    for &z in &[1e-3, 0.1, 1.0, 7.0, 100.0, 1e4] {
        for &r in &[0.01, 1.0, 30.0, 400.0] {
            let integral = laplace_origin_road_integral(z, r, 4.0, 0.01, &q).unwrap();
            let hyper = laplace_origin_road(z, r, 4.0, 0.01).unwrap();
            let closed = laplace_origin_road_alpha4(z, r, 0.01).unwrap();
            assert!(rel(hyper, integral) < 1e-9, "z={z} r={r}");
            assert!(rel(closed, integral) < 1e-9, "z={z} r={r}");
        }
    }
}

#[test]
fn all_roads_transform_against_nested_quadrature() {
    // Oracle: the same double integral with every inner integral in closed form (α = 4)
    // for the roads missing the disc.
    let arg = LaplaceArg {
        s: 2e-3,
        r: 8.0,
        alpha: 4.0,
        mu_v: 0.1,
        lambda_r: 0.001,
        window_radius: 500.0,
        p_v: 1000.0,
    };
    let q = tight();
    let inside = integrate(
        |y| 1.0 - laplace_road_inside(&arg, y, &q).unwrap(),
        0.0,
        arg.r,
        &q,
    )
    .unwrap();
    let outside = integrate(
        |y| 1.0 - laplace_road_outside_alpha4(&arg, y).unwrap(),
        arg.r,
        arg.window_radius,
        &q,
    )
    .unwrap();
    let oracle = (-2.0 * PI * arg.lambda_r * (inside + outside)).exp();
    let got = laplace_all_roads(&arg, &QuadratureSpec::default()).unwrap();
    assert!(rel(got, oracle) < 1e-7, "{got} vs {oracle}");
}

#[test]
fn window_tail_fraction_policy() {
    let p = fig3();
    let m = Model::new(p, 500.0).unwrap();
    let r_ref = m.v2v_quantile(0.5).unwrap();
    assert!(m.window_tail_fraction(r_ref, 4.0) > 1e-3);
    let big = Model::new(p, 4000.0).unwrap();
    assert!(big.window_tail_fraction(r_ref, 4.0) < 1e-3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn outside_road_closed_form(s in 1e-6f64..1e3, y in 0.01f64..300.0, mu in 1e-3f64..1.0) {
        let arg = LaplaceArg { s, r: 0.0, alpha: 4.0, mu_v: mu, lambda_r: 0.005, window_radius: 500.0, p_v: 1.0 };
        let integral = laplace_road_outside(&arg, y, &QuadratureSpec::default()).unwrap();
        let closed = laplace_road_outside_alpha4(&arg, y).unwrap();
        prop_assert!(((closed - integral) / integral).abs() < 1e-6);
    }

    #[test]
    fn laplace_values_are_probabilities(s in 0.0f64..10.0, r in 0.0f64..50.0, mu in 1e-3f64..0.5) {
        let arg = LaplaceArg { s, r, alpha: 4.0, mu_v: mu, lambda_r: 0.005, window_radius: 500.0, p_v: 1000.0 };
        let l = laplace_all_roads(&arg, &QuadratureSpec::default()).unwrap();
        prop_assert!(l > 0.0 && l <= 1.0);
        let more = LaplaceArg { s: s * 2.0 + 1e-3, ..arg };
        prop_assert!(laplace_all_roads(&more, &QuadratureSpec::default()).unwrap() <= l + 1e-12);
        let wider = LaplaceArg { r: r + 5.0, ..arg };
        prop_assert!(laplace_all_roads(&wider, &QuadratureSpec::default()).unwrap() >= l - 1e-12);
    }

    #[test]
    fn origin_road_is_a_probability(z in 0.0f64..1e3, r in 0.0f64..100.0, alpha in 2.1f64..6.0) {
        let l = laplace_origin_road(z, r, alpha, 0.05).unwrap();
        prop_assert!(l > 0.0 && l <= 1.0);
        let q = QuadratureSpec::default();
        let i = laplace_origin_road_integral(z, r, alpha, 0.05, &q).unwrap();
        prop_assert!((l - i).abs() < 1e-7);
    }

    #[test]
    fn conditional_success_is_monotone_in_distance(r in 0.1f64..40.0, dr in 0.1f64..20.0) {
        let m = Model::new(fig4(), 500.0).unwrap();
        let a = m.success_v2v_given_r(1.0, r).unwrap();
        let b = m.success_v2v_given_r(1.0, r + dr).unwrap();
        prop_assert!(b <= a + 1e-12);
        prop_assert!(a > 0.0 && a <= 1.0);
    }
}
