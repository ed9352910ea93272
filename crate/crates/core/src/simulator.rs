//! Seeded Monte Carlo estimates of the distance laws, association
//! probabilities, Laplace functionals and success probabilities.
//!
//! Trial `i` draws everything from `seed.stream(i)`, and per-trial results
//! are reduced in index order, so estimates do not depend on how many worker
//! threads ran the trials. Within one trial the realization is drawn first,
//! then one Rayleigh power gain per vehicle in road order, then the gain of
//! the vehicle-to-base-station link. The exclusion mode never changes what is
//! drawn, so runs that differ only in mode, bias or threshold share their
//! random numbers.

use rand::Rng;
use rand_distr::Exp1;
use statrs::distribution::{Beta, ContinuousCDF, Normal};
use thiserror::Error;

use crate::analytic::{interference_tail_fraction, AnalyticError, Model};
use crate::par::{map_indexed, Execution};
use crate::pointprocess::{
    distance_from_origin, to_xy, NetworkParams, NetworkRealization, ParamError, Point2, RngSeed,
    SimRng,
};

/// Largest admissible share of mean interference from beyond the window.
pub const WINDOW_TAIL_LIMIT: f64 = 1e-3;

/// Window radii tried by [`auto_window_radius`]: 500 Km doubled up to six times.
pub const BASE_WINDOW_RADIUS: f64 = 500.0;
const MAX_WINDOW_DOUBLINGS: u32 = 6;

/// Give up on a trial after this many empty realizations in a row.
pub const MAX_RESAMPLES: u32 = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error(
        "window radius {window_radius} Km leaves {tail_fraction:.3e} of the mean interference outside the window (limit {limit:.0e}); {}",
        match suggested { Some(w) => format!("use a window radius of at least {w} Km"), None => "no window up to 32000 Km is large enough".to_string() }
    )]
    WindowTooSmall {
        window_radius: f64,
        tail_fraction: f64,
        limit: f64,
        suggested: Option<f64>,
    },
    #[error("trial {trial}: {attempts} consecutive realizations without a transmitting vehicle or base station")]
    Degenerate { trial: u64, attempts: u32 },
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
}

/// Which interferers a link sees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExclusionMode {
    /// Receiver at the origin for both links; only vehicles farther than the
    /// serving distance interfere.
    #[default]
    OriginCentred,
    /// The V2B receiver is the serving base station and every transmitting
    /// vehicle interferes there.
    Physical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Link {
    V2v,
    V2b,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub params: NetworkParams,
    pub window_radius: f64,
    pub trials: u64,
    pub seed: RngSeed,
    pub mode: ExclusionMode,
    pub ci_level: f64,
    /// Clopper–Pearson intervals for proportions instead of the normal approximation.
    pub exact_ci: bool,
    pub execution: Execution,
    /// Refuse windows whose interference tail exceeds [`WINDOW_TAIL_LIMIT`].
    pub window_check: bool,
}

impl SimConfig {
    pub fn new(params: NetworkParams, window_radius: f64, trials: u64, seed: u64) -> Self {
        Self {
            params,
            window_radius,
            trials,
            seed: RngSeed(seed),
            mode: ExclusionMode::OriginCentred,
            ci_level: 0.95,
            exact_ci: false,
            execution: Execution::default(),
            window_check: true,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        self.params.validate()?;
        if self.trials == 0 {
            return Err(SimError::InvalidConfig("trials must be >= 1".into()));
        }
        if !(self.window_radius > 0.0 && self.window_radius.is_finite()) {
            return Err(SimError::InvalidConfig(format!(
                "window radius {} must be finite and > 0",
                self.window_radius
            )));
        }
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            return Err(SimError::InvalidConfig(format!(
                "ci_level {} must be in (0, 1)",
                self.ci_level
            )));
        }
        Ok(())
    }
}

/// Share of the mean interference at a receiver with exclusion radius equal
/// to the median nearest-vehicle distance that comes from beyond `window_radius`.
pub fn window_tail_fraction(params: &NetworkParams, window_radius: f64) -> Result<f64, SimError> {
    let model = Model::new(*params, window_radius)?;
    let r_ref = model.v2v_quantile(0.5)?;
    let alpha = params.alpha_v.min(params.alpha_b);
    Ok(interference_tail_fraction(
        params,
        window_radius,
        r_ref,
        alpha,
    ))
}

/// Smallest `500 · 2^k` Km (`k ≤ 6`) whose tail fraction is below the limit.
pub fn auto_window_radius(params: &NetworkParams) -> Result<f64, SimError> {
    let mut last = (0.0, 1.0);
    for k in 0..=MAX_WINDOW_DOUBLINGS {
        let w = BASE_WINDOW_RADIUS * f64::from(1u32 << k);
        let frac = window_tail_fraction(params, w)?;
        if frac < WINDOW_TAIL_LIMIT {
            return Ok(w);
        }
        last = (w, frac);
    }
    Err(SimError::WindowTooSmall {
        window_radius: last.0,
        tail_fraction: last.1,
        limit: WINDOW_TAIL_LIMIT,
        suggested: None,
    })
}

/// Fails with guidance when the configured window truncates too much interference.
pub fn check_window(config: &SimConfig) -> Result<(), SimError> {
    if !config.window_check {
        return Ok(());
    }
    let frac = window_tail_fraction(&config.params, config.window_radius)?;
    if frac < WINDOW_TAIL_LIMIT {
        return Ok(());
    }
    Err(SimError::WindowTooSmall {
        window_radius: config.window_radius,
        tail_fraction: frac,
        limit: WINDOW_TAIL_LIMIT,
        suggested: auto_window_radius(&config.params).ok(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub r_v: f64,
    pub r_b: f64,
    pub mode_selected: Link,
    /// SINR of the selected link.
    pub sinr: f64,
    /// `sinr > z` at the configured threshold.
    pub success: bool,
    /// Interference from the receiver's own road on the selected link, mW.
    pub i_r: f64,
    /// Interference from all other roads on the selected link, mW.
    pub i_v: f64,
    pub sinr_v2v: f64,
    pub sinr_v2b: f64,
    /// Empty realizations discarded before this one.
    pub resamples: u32,
}

impl TrialOutcome {
    pub fn succeeds(&self, link: Link, z: f64) -> bool {
        match link {
            Link::V2v => self.sinr_v2v > z,
            Link::V2b => self.sinr_v2b > z,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Nearest {
    line: usize,
    index: usize,
    r_v: f64,
    bs: Point2,
    r_b: f64,
}

fn locate(real: &NetworkRealization) -> Option<Nearest> {
    let mut best: Option<(usize, usize, f64)> = None;
    for (i, ts) in real.vehicles.iter().enumerate() {
        let flags = real.tx_flags.get(i);
        for (j, &t) in ts.iter().enumerate() {
            if !flags.and_then(|f| f.get(j)).copied().unwrap_or(true) {
                continue;
            }
            let d = distance_from_origin(&real.lines[i], t);
            if best.is_none_or(|b| d < b.2) {
                best = Some((i, j, d));
            }
        }
    }
    let (line, index, r_v) = best?;
    let bs = real
        .base_stations
        .iter()
        .copied()
        .min_by(|a, b| a.norm().total_cmp(&b.norm()))?;
    Some(Nearest {
        line,
        index,
        r_v,
        bs,
        r_b: bs.norm(),
    })
}

/// `d^-α`, with a multiplication-only path for `α = 4`.
#[inline]
fn path_gain(d: f64, alpha: f64) -> f64 {
    if alpha == 4.0 {
        let d2 = d * d;
        1.0 / (d2 * d2)
    } else {
        d.powf(-alpha)
    }
}

fn draw_realization(
    config: &SimConfig,
    trial: u64,
    rng: &mut SimRng,
) -> Result<(NetworkRealization, Nearest, u32), SimError> {
    let mut resamples = 0;
    loop {
        let real = NetworkRealization::sample(&config.params, config.window_radius, rng);
        if let Some(n) = locate(&real) {
            return Ok((real, n, resamples));
        }
        resamples += 1;
        if resamples >= MAX_RESAMPLES {
            return Err(SimError::Degenerate {
                trial,
                attempts: resamples,
            });
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct LinkBudget {
    signal: f64,
    i_r: f64,
    i_v: f64,
}

impl LinkBudget {
    fn sinr(&self, sigma2: f64) -> f64 {
        self.signal / (self.i_r + self.i_v + sigma2)
    }
}

fn evaluate(
    config: &SimConfig,
    real: &NetworkRealization,
    near: Nearest,
    rng: &mut SimRng,
    resamples: u32,
) -> TrialOutcome {
    let p = &config.params;
    let gains: Vec<Vec<f64>> = real
        .vehicles
        .iter()
        .map(|ts| ts.iter().map(|_| rng.sample::<f64, _>(Exp1)).collect())
        .collect();
    let h_b: f64 = rng.sample(Exp1);

    let mut v2v = LinkBudget {
        signal: p.p_v * gains[near.line][near.index] * path_gain(near.r_v, p.alpha_v),
        ..Default::default()
    };
    let mut v2b = LinkBudget {
        signal: p.p_v * h_b * path_gain(near.r_b, p.alpha_b),
        ..Default::default()
    };
    let typical = real.typical_line_index;

    for (i, ts) in real.vehicles.iter().enumerate() {
        let line = &real.lines[i];
        let flags = real.tx_flags.get(i);
        let own_road = Some(i) == typical;
        for (j, &t) in ts.iter().enumerate() {
            if !flags.and_then(|f| f.get(j)).copied().unwrap_or(true) {
                continue;
            }
            let g = p.p_v * gains[i][j];
            let d = distance_from_origin(line, t);
            if !(i == near.line && j == near.index) {
                let x = g * path_gain(d, p.alpha_v);
                if own_road {
                    v2v.i_r += x;
                } else {
                    v2v.i_v += x;
                }
            }
            let x = match config.mode {
                ExclusionMode::OriginCentred if d > near.r_b => g * path_gain(d, p.alpha_b),
                ExclusionMode::OriginCentred => 0.0,
                ExclusionMode::Physical => {
                    g * path_gain(to_xy(line, t).distance(near.bs), p.alpha_b)
                }
            };
            if own_road {
                v2b.i_r += x;
            } else {
                v2b.i_v += x;
            }
        }
    }

    let sinr_v2v = v2v.sinr(p.sigma2);
    let sinr_v2b = v2b.sinr(p.sigma2);
    let (mode_selected, chosen, sinr) =
        if p.bias.prefers_v2v(near.r_v, near.r_b, p.alpha_v, p.alpha_b) {
            (Link::V2v, v2v, sinr_v2v)
        } else {
            (Link::V2b, v2b, sinr_v2b)
        };
    TrialOutcome {
        r_v: near.r_v,
        r_b: near.r_b,
        mode_selected,
        sinr,
        success: sinr > p.z,
        i_r: chosen.i_r,
        i_v: chosen.i_v,
        sinr_v2v,
        sinr_v2b,
        resamples,
    }
}

/// Evaluates both links on a given realization, drawing fading gains from
/// `rng`. `None` when there is no transmitting vehicle or no base station.
pub fn evaluate_realization(
    config: &SimConfig,
    real: &NetworkRealization,
    rng: &mut SimRng,
) -> Option<TrialOutcome> {
    let near = locate(real)?;
    Some(evaluate(config, real, near, rng, 0))
}

/// One Palm-conditioned trial. Realizations without a transmitting vehicle or
/// without a base station are redrawn from the same stream and counted.
pub fn run_trial(config: &SimConfig, rng: &mut SimRng) -> Result<TrialOutcome, SimError> {
    run_indexed_trial(config, 0, rng)
}

fn run_indexed_trial(
    config: &SimConfig,
    trial: u64,
    rng: &mut SimRng,
) -> Result<TrialOutcome, SimError> {
    let (real, near, resamples) = draw_realization(config, trial, rng)?;
    Ok(evaluate(config, &real, near, rng, resamples))
}

/// All trials of `config`, in trial order.
pub fn run_trials(config: &SimConfig) -> Result<Vec<TrialOutcome>, SimError> {
    config.validate()?;
    map_indexed(config.execution, config.trials, |i| {
        run_indexed_trial(config, i, &mut config.seed.stream(i))
    })
    .into_iter()
    .collect()
}

/// Point estimate with a symmetric confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub ci_halfwidth: f64,
    pub n: u64,
}

fn normal_quantile(level: f64) -> f64 {
    Normal::standard().inverse_cdf(0.5 + 0.5 * level)
}

impl Estimate {
    /// Proportion `successes / n`; normal approximation, or the larger side of
    /// the Clopper–Pearson interval when `exact`.
    pub fn proportion(successes: u64, n: u64, level: f64, exact: bool) -> Self {
        if n == 0 {
            return Self {
                mean: f64::NAN,
                ci_halfwidth: f64::NAN,
                n,
            };
        }
        let nf = n as f64;
        let k = successes as f64;
        let mean = k / nf;
        let ci_halfwidth = if exact {
            let tail = 0.5 * (1.0 - level);
            let lo = if successes == 0 {
                0.0
            } else {
                Beta::new(k, nf - k + 1.0)
                    .expect("positive shapes")
                    .inverse_cdf(tail)
            };
            let hi = if successes == n {
                1.0
            } else {
                Beta::new(k + 1.0, nf - k)
                    .expect("positive shapes")
                    .inverse_cdf(1.0 - tail)
            };
            (mean - lo).max(hi - mean)
        } else {
            normal_quantile(level) * (mean * (1.0 - mean) / nf).sqrt()
        };
        Self {
            mean,
            ci_halfwidth,
            n,
        }
    }

    /// Sample mean with a normal-approximation interval.
    pub fn sample_mean(values: &[f64], level: f64) -> Self {
        let n = values.len();
        if n == 0 {
            return Self {
                mean: f64::NAN,
                ci_halfwidth: f64::NAN,
                n: 0,
            };
        }
        let nf = n as f64;
        let mean = values.iter().sum::<f64>() / nf;
        let var = if n > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (nf - 1.0)
        } else {
            0.0
        };
        Self {
            mean,
            ci_halfwidth: normal_quantile(level) * (var / nf).sqrt(),
            n: n as u64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuccessEstimate {
    /// Threshold, linear.
    pub z: f64,
    pub v2x: Estimate,
    /// Selected V2V and succeeded.
    pub v2v_success: Estimate,
    /// Selected V2B and succeeded.
    pub v2b_success: Estimate,
    /// V2V link of every trial, whatever was selected.
    pub v2v_only: Estimate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuccessReport {
    pub per_z: Vec<SuccessEstimate>,
    pub v2v_assoc: Estimate,
    pub v2b_assoc: Estimate,
    pub resamples: u64,
}

/// Success fractions at every threshold in `z_values` from one set of trials.
pub fn estimate_success(config: &SimConfig, z_values: &[f64]) -> Result<SuccessReport, SimError> {
    config.validate()?;
    check_window(config)?;
    let outcomes = run_trials(config)?;
    Ok(summarize(config, &outcomes, z_values))
}

/// Tallies `outcomes` at each threshold.
pub fn summarize(config: &SimConfig, outcomes: &[TrialOutcome], z_values: &[f64]) -> SuccessReport {
    let n = outcomes.len() as u64;
    let level = config.ci_level;
    let est = |k: usize| Estimate::proportion(k as u64, n, level, config.exact_ci);
    let v2v_selected = outcomes
        .iter()
        .filter(|o| o.mode_selected == Link::V2v)
        .count();
    let per_z = z_values
        .iter()
        .map(|&z| {
            let mut joint_v2v = 0;
            let mut joint_v2b = 0;
            let mut only = 0;
            for o in outcomes {
                match o.mode_selected {
                    Link::V2v if o.sinr_v2v > z => joint_v2v += 1,
                    Link::V2b if o.sinr_v2b > z => joint_v2b += 1,
                    _ => {}
                }
                if o.sinr_v2v > z {
                    only += 1;
                }
            }
            SuccessEstimate {
                z,
                v2x: est(joint_v2v + joint_v2b),
                v2v_success: est(joint_v2v),
                v2b_success: est(joint_v2b),
                v2v_only: est(only),
            }
        })
        .collect();
    SuccessReport {
        per_z,
        v2v_assoc: est(v2v_selected),
        v2b_assoc: est(outcomes.len() - v2v_selected),
        resamples: outcomes.iter().map(|o| u64::from(o.resamples)).sum(),
    }
}

/// Nearest-vehicle and nearest-base-station distances of every trial; the
/// realizations are the ones [`run_trials`] would use.
pub fn sample_distances(config: &SimConfig) -> Result<Vec<(f64, f64)>, SimError> {
    config.validate()?;
    map_indexed(config.execution, config.trials, |i| {
        let mut rng = config.seed.stream(i);
        draw_realization(config, i, &mut rng).map(|(_, n, _)| (n.r_v, n.r_b))
    })
    .into_iter()
    .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceCdf {
    pub radii: Vec<f64>,
    pub cdf: Vec<f64>,
}

/// Empirical CDF of the nearest transmitting vehicle at each radius.
pub fn estimate_distance_cdf(config: &SimConfig, radii: &[f64]) -> Result<DistanceCdf, SimError> {
    let mut r_v: Vec<f64> = sample_distances(config)?
        .into_iter()
        .map(|(v, _)| v)
        .collect();
    r_v.sort_by(f64::total_cmp);
    let n = r_v.len() as f64;
    let cdf = radii
        .iter()
        .map(|&r| r_v.partition_point(|&d| d <= r) as f64 / n)
        .collect();
    Ok(DistanceCdf {
        radii: radii.to_vec(),
        cdf,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssociationEstimate {
    pub v2v: Estimate,
    pub v2b: Estimate,
}

/// Fraction of trials selecting each link under the configured bias.
pub fn estimate_association(config: &SimConfig) -> Result<AssociationEstimate, SimError> {
    let p = &config.params;
    let d = sample_distances(config)?;
    let n = d.len() as u64;
    let k = d
        .iter()
        .filter(|(r_v, r_b)| p.bias.prefers_v2v(*r_v, *r_b, p.alpha_v, p.alpha_b))
        .count() as u64;
    Ok(AssociationEstimate {
        v2v: Estimate::proportion(k, n, config.ci_level, config.exact_ci),
        v2b: Estimate::proportion(n - k, n, config.ci_level, config.exact_ci),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceEstimate {
    /// `E[exp(-s I_v)]`, roads other than the receiver's.
    pub other_roads: Estimate,
    /// `E[exp(-s I_r)]`, the receiver's own road.
    pub origin_road: Estimate,
    /// `E[exp(-s (I_v + I_r))]`
    pub total: Estimate,
}

/// Laplace functional of the interference at the origin from transmitting
/// vehicles outside the disc of radius `r`, path-loss exponent `alpha_v`.
/// Vehicles inside the disc are deleted rather than the realization rejected.
pub fn estimate_laplace_functional(
    config: &SimConfig,
    s: f64,
    r: f64,
) -> Result<LaplaceEstimate, SimError> {
    config.validate()?;
    if !(s >= 0.0 && s.is_finite()) {
        return Err(SimError::InvalidConfig(format!(
            "Laplace variable s = {s} must be finite and >= 0"
        )));
    }
    if !(r >= 0.0 && r.is_finite()) {
        return Err(SimError::InvalidConfig(format!(
            "exclusion radius r = {r} must be finite and >= 0"
        )));
    }
    check_window(config)?;
    let p = config.params;
    let samples: Vec<(f64, f64)> = map_indexed(config.execution, config.trials, |i| {
        let mut rng = config.seed.stream(i);
        let real = NetworkRealization::sample(&p, config.window_radius, &mut rng);
        let typical = real.typical_line_index;
        let (mut i_r, mut i_v) = (0.0, 0.0);
        for (li, ts) in real.vehicles.iter().enumerate() {
            let flags = real.tx_flags.get(li);
            for (j, &t) in ts.iter().enumerate() {
                let g: f64 = rng.sample(Exp1);
                if !flags.and_then(|f| f.get(j)).copied().unwrap_or(true) {
                    continue;
                }
                let d = distance_from_origin(&real.lines[li], t);
                if d <= r {
                    continue;
                }
                let x = p.p_v * g * path_gain(d, p.alpha_v);
                if Some(li) == typical {
                    i_r += x;
                } else {
                    i_v += x;
                }
            }
        }
        (i_v, i_r)
    });
    let level = config.ci_level;
    let pick = |f: &dyn Fn(&(f64, f64)) -> f64| -> Estimate {
        let v: Vec<f64> = samples.iter().map(|x| (-s * f(x)).exp()).collect();
        Estimate::sample_mean(&v, level)
    };
    Ok(LaplaceEstimate {
        other_roads: pick(&|x| x.0),
        origin_road: pick(&|x| x.1),
        total: pick(&|x| x.0 + x.1),
    })
}
