use rand::Rng;
use rand_distr::Exp1;
use v2x_core::analytic::Model;
use v2x_core::par::Execution;
use v2x_core::pointprocess::*;
use v2x_core::simulator::*;

fn params(mu_v: f64, bias: Bias) -> NetworkParams {
    NetworkParams {
        lambda_r: 0.005,
        mu_v,
        lambda_b: 2e-5,
        bias,
        p_v: 1000.0,
        alpha_v: 4.0,
        alpha_b: 4.0,
        sigma2: 10f64.powf(-10.4),
        p_tx: 1.0,
        z: 1.0,
    }
}

fn config(mu_v: f64, bias: Bias, trials: u64, seed: u64) -> SimConfig {
    SimConfig::new(params(mu_v, bias), 500.0, trials, seed)
}

#[test]
fn same_seed_same_outcomes() {
    let c = config(0.05, Bias::Finite(1.0), 300, 11);
    assert_eq!(run_trials(&c).unwrap(), run_trials(&c).unwrap());
    let other = SimConfig {
        seed: RngSeed(12),
        ..c
    };
    assert_ne!(run_trials(&c).unwrap(), run_trials(&other).unwrap());
}

#[test]
fn sequential_and_parallel_agree_exactly() {
    let par = SimConfig {
        execution: Execution::Parallel,
        ..config(0.05, Bias::Finite(1.0), 400, 3)
    };
    let seq = SimConfig {
        execution: Execution::Sequential,
        ..par
    };
    assert_eq!(run_trials(&par).unwrap(), run_trials(&seq).unwrap());
    let zs = [0.1, 1.0, 10.0];
    assert_eq!(
        estimate_success(&par, &zs).unwrap(),
        estimate_success(&seq, &zs).unwrap()
    );
}

#[test]
fn bias_limits_fix_the_selected_link() {
    let all_v2b = run_trials(&config(0.05, Bias::Finite(0.0), 300, 5)).unwrap();
    assert!(all_v2b.iter().all(|o| o.mode_selected == Link::V2b));
    let all_v2v = run_trials(&config(0.05, Bias::Infinite, 300, 5)).unwrap();
    assert!(all_v2v.iter().all(|o| o.mode_selected == Link::V2v));
}

#[test]
fn zero_threshold_always_succeeds() {
    let c = config(0.05, Bias::Finite(1.0), 500, 6);
    let report = estimate_success(&c, &[0.0]).unwrap();
    let z0 = report.per_z[0];
    assert_eq!(z0.v2x.mean, 1.0);
    assert_eq!(z0.v2v_only.mean, 1.0);
    assert_eq!(z0.v2v_success.mean, report.v2v_assoc.mean);
    assert_eq!(z0.v2b_success.mean, report.v2b_assoc.mean);
}

#[test]
fn success_counts_are_nested() {
    let c = config(0.02, Bias::Finite(1.0), 2000, 7);
    let zs = [0.01, 0.1, 1.0, 10.0, 100.0];
    let report = estimate_success(&c, &zs).unwrap();
    for w in report.per_z.windows(2) {
        assert!(w[1].v2x.mean <= w[0].v2x.mean);
        assert!(w[1].v2v_only.mean <= w[0].v2v_only.mean);
    }
    for e in &report.per_z {
        assert!((e.v2x.mean - e.v2v_success.mean - e.v2b_success.mean).abs() < 1e-12);
        assert!(e.v2v_success.mean <= report.v2v_assoc.mean);
    }
}

/// Typical road along the y axis with vehicles at t = 1, 3, -10 and one base
/// station at (5, 0).
fn hand_built() -> NetworkRealization {
    let mut real = NetworkRealization::empty(100.0);
    real.lines.push(Line { theta: 0.0, y: 0.0 });
    real.vehicles.push(vec![1.0, 3.0, -10.0]);
    real.tx_flags.push(vec![true; 3]);
    real.typical_line_index = Some(0);
    real.base_stations.push(Point2 { x: 5.0, y: 0.0 });
    real
}

#[test]
fn interference_bookkeeping_on_a_fixed_network() {
    let real = hand_built();
    let p = NetworkParams {
        p_v: 1.0,
        sigma2: 1e-9,
        ..params(0.01, Bias::Finite(0.0))
    };
    let rng = RngSeed(9).stream(0);
    let mut replay = rng.clone();
    let g: Vec<f64> = (0..3).map(|_| replay.sample(Exp1)).collect();
    let h_b: f64 = replay.sample(Exp1);
    let signal_v2b = h_b * 5f64.powi(-4);

    let origin = SimConfig::new(p, 100.0, 1, 0);
    let o = evaluate_realization(&origin, &real, &mut rng.clone()).unwrap();
    assert_eq!((o.r_v, o.r_b), (1.0, 5.0));
    assert_eq!(o.mode_selected, Link::V2b);
    // Only the vehicle beyond the base-station distance interferes.
    let i_origin = g[2] * 10f64.powi(-4);
    assert!((o.i_r - i_origin).abs() < 1e-15);
    assert_eq!(o.i_v, 0.0);
    assert!((o.sinr_v2b / (signal_v2b / (i_origin + 1e-9)) - 1.0).abs() < 1e-12);
    let i_v2v = g[1] * 3f64.powi(-4) + g[2] * 10f64.powi(-4);
    assert!((o.sinr_v2v / (g[0] / (i_v2v + 1e-9)) - 1.0).abs() < 1e-12);

    let physical = SimConfig {
        mode: ExclusionMode::Physical,
        ..origin
    };
    let o = evaluate_realization(&physical, &real, &mut rng.clone()).unwrap();
    let i_phys: f64 = [1.0f64, 3.0, -10.0]
        .iter()
        .zip(&g)
        .map(|(t, g)| g * (25.0 + t * t).powi(-2))
        .sum();
    assert!((o.i_r - i_phys).abs() < 1e-15);
    assert!((o.sinr_v2b / (signal_v2b / (i_phys + 1e-9)) - 1.0).abs() < 1e-12);

    let mut no_bs = real.clone();
    no_bs.base_stations.clear();
    assert!(evaluate_realization(&origin, &no_bs, &mut rng.clone()).is_none());
}

#[test]
fn silent_vehicles_neither_serve_nor_interfere() {
    let mut real = hand_built();
    real.tx_flags[0] = vec![false, true, true];
    let p = NetworkParams {
        p_v: 1.0,
        ..params(0.01, Bias::Infinite)
    };
    let c = SimConfig::new(p, 100.0, 1, 0);
    let o = evaluate_realization(&c, &real, &mut RngSeed(1).stream(0)).unwrap();
    assert_eq!(o.r_v, 3.0);
    assert_eq!(o.mode_selected, Link::V2v);
    assert!(o.i_r > 0.0 && o.i_r < 10f64.powi(-4) * 50.0);
}

#[test]
fn confidence_interval_shrinks_with_root_n() {
    let e1 = Estimate::proportion(300, 1000, 0.95, false);
    let e2 = Estimate::proportion(600, 2000, 0.95, false);
    let e4 = Estimate::proportion(1200, 4000, 0.95, false);
    assert!((e2.ci_halfwidth / e1.ci_halfwidth - 0.5f64.sqrt()).abs() < 1e-12);
    assert!((e4.ci_halfwidth / e1.ci_halfwidth - 0.5).abs() < 1e-12);
    assert!((e1.ci_halfwidth - 1.959964 * (0.21f64 / 1000.0).sqrt()).abs() < 1e-6);

    let c = config(0.02, Bias::Finite(1.0), 1000, 13);
    let small = estimate_success(&c, &[1.0]).unwrap().per_z[0]
        .v2x
        .ci_halfwidth;
    let big = estimate_success(&SimConfig { trials: 4000, ..c }, &[1.0])
        .unwrap()
        .per_z[0]
        .v2x
        .ci_halfwidth;
    assert!(
        (big / small - 0.5).abs() < 0.5 * 0.15,
        "ratio {}",
        big / small
    );
}

#[test]
fn exact_interval_covers_the_boundary() {
    let e = Estimate::proportion(0, 50, 0.95, true);
    // Clopper-Pearson upper bound for 0 of n is 1 - (α/2)^(1/n).
    assert!((e.ci_halfwidth - (1.0 - 0.025f64.powf(1.0 / 50.0))).abs() < 1e-9);
    let n = Estimate::proportion(20, 50, 0.95, false);
    let x = Estimate::proportion(20, 50, 0.95, true);
    assert!(x.ci_halfwidth > n.ci_halfwidth);
}

#[test]
fn laplace_functional_limits() {
    let c = config(0.05, Bias::Finite(1.0), 200, 14);
    let zero = estimate_laplace_functional(&c, 0.0, 5.0).unwrap();
    assert_eq!(zero.total.mean, 1.0);
    assert_eq!(zero.origin_road.mean, 1.0);
    let sparse = SimConfig {
        params: params(1e-7, Bias::Finite(1.0)),
        window_check: false,
        ..c
    };
    let e = estimate_laplace_functional(&sparse, 1e-3, 1.0).unwrap();
    assert!(e.total.mean > 0.99);
    assert!(estimate_laplace_functional(&c, -1.0, 1.0).is_err());
}

#[test]
fn distance_cdf_bounds() {
    let c = config(0.05, Bias::Finite(1.0), 500, 15);
    let cdf = estimate_distance_cdf(&c, &[0.0, 5.0, 20.0, 1e6]).unwrap();
    assert_eq!(cdf.cdf[0], 0.0);
    assert_eq!(cdf.cdf[3], 1.0);
    assert!(cdf.cdf.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn association_fraction_matches_the_model() {
    let mu = 10f64.powf(-1.5);
    let p = params(mu, Bias::Finite(1.0));
    let c = SimConfig::new(p, 500.0, 20_000, 16);
    let mc = estimate_association(&c).unwrap();
    let analytic = Model::new(p, 500.0).unwrap().assoc_v2v().unwrap();
    assert!(
        (mc.v2v.mean - analytic).abs() < 0.02,
        "{} vs {analytic}",
        mc.v2v.mean
    );
    assert!((mc.v2v.mean + mc.v2b.mean - 1.0).abs() < 1e-12);
}

#[test]
fn v2v_fraction_grows_with_bias_under_common_numbers() {
    let mut prev = 0.0;
    for b in [0.01, 1.0, 100.0] {
        let a = estimate_association(&config(0.01, Bias::Finite(b), 2000, 17))
            .unwrap()
            .v2v
            .mean;
        assert!(a >= prev);
        prev = a;
    }
}

#[test]
fn small_window_is_rejected_with_a_suggestion() {
    let c = SimConfig::new(params(1e-3, Bias::Finite(1.0)), 500.0, 10, 1);
    match estimate_success(&c, &[1.0]) {
        Err(SimError::WindowTooSmall {
            tail_fraction,
            suggested: Some(w),
            ..
        }) => {
            assert!(tail_fraction >= WINDOW_TAIL_LIMIT);
            assert!(w > 500.0);
            assert!(window_tail_fraction(&c.params, w).unwrap() < WINDOW_TAIL_LIMIT);
        }
        other => panic!("unexpected {other:?}"),
    }
    assert_eq!(
        auto_window_radius(&params(0.1, Bias::Finite(1.0))).unwrap(),
        500.0
    );
}

#[test]
fn empty_networks_are_redrawn_then_reported() {
    let mut c = config(0.05, Bias::Finite(1.0), 200, 18);
    c.params.lambda_b = 2e-6;
    c.window_check = false;
    let out = run_trials(&c).unwrap();
    assert!(out.iter().any(|o| o.resamples > 0));
    c.params.lambda_b = 1e-14;
    c.trials = 1;
    assert!(matches!(run_trials(&c), Err(SimError::Degenerate { .. })));
}

#[test]
fn invalid_configs_are_rejected() {
    let c = config(0.05, Bias::Finite(1.0), 10, 1);
    assert!(run_trials(&SimConfig { trials: 0, ..c }).is_err());
    assert!(run_trials(&SimConfig {
        window_radius: -1.0,
        ..c
    })
    .is_err());
    assert!(run_trials(&SimConfig { ci_level: 1.0, ..c }).is_err());
}
