//! Runs an experiment: analytic values for every sweep row, then Monte Carlo
//! estimates when trials are requested.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use v2x_core::analytic::{Model, SuccessBreakdown};
use v2x_core::par::{map_indexed, Execution};
use v2x_core::pointprocess::NetworkParams;
use v2x_core::simulator::{
    auto_window_radius, estimate_success, sample_distances, Estimate, SimConfig, SimError,
    SuccessReport, BASE_WINDOW_RADIUS,
};

use crate::config::{ExperimentSpec, PlotKind, SweepParameter, WindowSetting};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSummary {
    pub trials: u64,
    pub resamples: u64,
    pub v2x: Estimate,
    pub v2v_success: Estimate,
    pub v2b_success: Estimate,
    pub v2v_only: Estimate,
    pub v2v_assoc: Estimate,
    pub v2b_assoc: Estimate,
}

impl McSummary {
    fn from_report(report: &SuccessReport, index: usize, trials: u64) -> Self {
        let e = &report.per_z[index];
        Self {
            trials,
            resamples: report.resamples,
            v2x: e.v2x,
            v2v_success: e.v2v_success,
            v2b_success: e.v2b_success,
            v2v_only: e.v2v_only,
            v2v_assoc: report.v2v_assoc,
            v2b_assoc: report.v2b_assoc,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceMc {
    pub trials: u64,
    pub cdf_v2v: f64,
    pub cdf_v2b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RowValues {
    Success {
        analytic: SuccessBreakdown,
        mc: Option<McSummary>,
    },
    Distance {
        cdf_v2v: f64,
        pdf_v2v: f64,
        cdf_v2b: f64,
        mc: Option<DistanceMc>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    /// Sweep value in the sweep parameter's own unit.
    pub value: f64,
    /// `NaN` when the row failed before a window was chosen.
    pub window_km: f64,
    pub outcome: Result<RowValues, String>,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub parameter: SweepParameter,
    pub plot: PlotKind,
    pub rows: Vec<Row>,
}

impl SweepResult {
    pub fn empty(parameter: SweepParameter, plot: PlotKind) -> Self {
        Self {
            parameter,
            plot,
            rows: Vec::new(),
        }
    }

    pub fn all_ok(&self) -> bool {
        self.rows.iter().all(|r| r.outcome.is_ok())
    }
}

fn sim_config(spec: &ExperimentSpec, params: NetworkParams, window: f64) -> SimConfig {
    let s = &spec.sim;
    SimConfig {
        mode: s.mode,
        ci_level: s.ci_level,
        exact_ci: s.exact_ci,
        window_check: s.window_check,
        execution: Execution::Parallel,
        ..SimConfig::new(params, window, s.trials, s.seed)
    }
}

fn window_for(spec: &ExperimentSpec, params: &NetworkParams) -> Result<f64, SimError> {
    match spec.sim.window {
        WindowSetting::Fixed(w) => Ok(w),
        WindowSetting::Auto => auto_window_radius(params),
    }
}

/// Runs every row; failed rows are recorded and the sweep continues.
pub fn run(spec: &ExperimentSpec) -> SweepResult {
    run_with_progress(spec, |_| {})
}

/// [`run`] calling `progress` after each row completes, in row order.
pub fn run_with_progress(spec: &ExperimentSpec, mut progress: impl FnMut(&Row)) -> SweepResult {
    let rows = match spec.sweep.parameter {
        SweepParameter::RadiusKm => run_distance(spec),
        SweepParameter::ZDb => run_threshold(spec),
        _ => run_parameter(spec),
    };
    for r in &rows {
        progress(r);
    }
    SweepResult {
        parameter: spec.sweep.parameter,
        plot: spec.plot,
        rows,
    }
}

fn analytic_row(params: NetworkParams, window: f64) -> Result<SuccessBreakdown, String> {
    Model::new(params, window)
        .and_then(|m| m.success_v2x(params.z))
        .map_err(|e| e.to_string())
}

/// Threshold sweep: one window and, for the simulation, one set of trials
/// evaluated at every threshold.
fn run_threshold(spec: &ExperimentSpec) -> Vec<Row> {
    let values = &spec.sweep.values;
    let window = match window_for(spec, &spec.base) {
        Ok(w) => w,
        Err(e) => return failed_rows(values, &e.to_string()),
    };
    let started = Instant::now();
    let analytic: Vec<(Result<SuccessBreakdown, String>, Duration)> =
        map_indexed(Execution::Parallel, values.len() as u64, |i| {
            let t = Instant::now();
            let p = SweepParameter::ZDb.apply(&spec.base, values[i as usize]);
            (analytic_row(p, window), t.elapsed())
        });
    let mc = if spec.sim.trials > 0 {
        let zs: Vec<f64> = values
            .iter()
            .map(|&v| SweepParameter::ZDb.apply(&spec.base, v).z)
            .collect();
        Some(estimate_success(&sim_config(spec, spec.base, window), &zs).map_err(|e| e.to_string()))
    } else {
        None
    };
    let mc_share = if values.is_empty() {
        Duration::ZERO
    } else {
        started.elapsed() / values.len() as u32
    };
    values
        .iter()
        .zip(analytic)
        .enumerate()
        .map(|(i, (&value, (a, t)))| {
            let outcome = match (a, &mc) {
                (Err(e), _) => Err(e),
                (Ok(_), Some(Err(e))) => Err(e.clone()),
                (Ok(analytic), Some(Ok(report))) => Ok(RowValues::Success {
                    analytic,
                    mc: Some(McSummary::from_report(report, i, spec.sim.trials)),
                }),
                (Ok(analytic), None) => Ok(RowValues::Success { analytic, mc: None }),
            };
            Row {
                value,
                window_km: window,
                outcome,
                elapsed: if mc.is_some() { mc_share } else { t },
            }
        })
        .collect()
}

/// Row parameters, window and analytic values, before any simulation.
type PreparedRow = (
    NetworkParams,
    Result<f64, String>,
    Result<SuccessBreakdown, String>,
    Duration,
);

/// Sweeps over a network parameter: each row has its own window and trials.
fn run_parameter(spec: &ExperimentSpec) -> Vec<Row> {
    let param = spec.sweep.parameter;
    let values = &spec.sweep.values;
    let prepared: Vec<PreparedRow> = map_indexed(Execution::Parallel, values.len() as u64, |i| {
        let t = Instant::now();
        let p = param.apply(&spec.base, values[i as usize]);
        let w = window_for(spec, &p).map_err(|e| e.to_string());
        let a = match &w {
            Ok(w) => analytic_row(p, *w),
            Err(e) => Err(e.clone()),
        };
        (p, w, a, t.elapsed())
    });
    values
        .iter()
        .zip(prepared)
        .map(|(&value, (p, w, a, t_analytic))| {
            let started = Instant::now();
            let window_km = *w.as_ref().unwrap_or(&f64::NAN);
            let outcome = a.and_then(|analytic| {
                let mc = if spec.sim.trials > 0 {
                    let report = estimate_success(&sim_config(spec, p, window_km), &[p.z])
                        .map_err(|e| e.to_string())?;
                    Some(McSummary::from_report(&report, 0, spec.sim.trials))
                } else {
                    None
                };
                Ok(RowValues::Success { analytic, mc })
            });
            Row {
                value,
                window_km,
                outcome,
                elapsed: t_analytic + started.elapsed(),
            }
        })
        .collect()
}

/// Nearest-vehicle and nearest-base-station CDFs on a radius grid.
fn run_distance(spec: &ExperimentSpec) -> Vec<Row> {
    let radii = &spec.sweep.values;
    let largest = radii.last().copied().unwrap_or(0.0);
    let window = match spec.sim.window {
        WindowSetting::Fixed(w) => w,
        WindowSetting::Auto => {
            let mut w = BASE_WINDOW_RADIUS;
            while w < largest {
                w *= 2.0;
            }
            w
        }
    };
    if largest > window {
        let msg = format!("largest radius {largest} Km lies outside the {window} Km window");
        return failed_rows(radii, &msg);
    }
    let p = spec.base;
    let started = Instant::now();
    let model = match Model::new(p, window) {
        Ok(m) => m,
        Err(e) => return failed_rows(radii, &e.to_string()),
    };
    let distances = if spec.sim.trials > 0 {
        let config = SimConfig {
            window_check: false,
            ..sim_config(spec, p, window)
        };
        match sample_distances(&config) {
            Ok(mut d) => {
                let mut r_v: Vec<f64> = d.iter().map(|x| x.0).collect();
                d.sort_by(|a, b| a.1.total_cmp(&b.1));
                let r_b: Vec<f64> = d.iter().map(|x| x.1).collect();
                r_v.sort_by(f64::total_cmp);
                Some(Ok((r_v, r_b)))
            }
            Err(e) => Some(Err(e.to_string())),
        }
    } else {
        None
    };
    let per_row = started.elapsed() / radii.len().max(1) as u32;
    radii
        .iter()
        .map(|&r| {
            let analytic = model
                .v2v_cdf(r)
                .and_then(|c| Ok((c, model.v2v_pdf(r)?)))
                .map_err(|e| e.to_string());
            let outcome = analytic.and_then(|(cdf_v2v, pdf_v2v)| {
                let mc = match &distances {
                    None => None,
                    Some(Err(e)) => return Err(e.clone()),
                    Some(Ok((r_v, r_b))) => {
                        let n = r_v.len() as f64;
                        Some(DistanceMc {
                            trials: spec.sim.trials,
                            cdf_v2v: r_v.partition_point(|&d| d <= r) as f64 / n,
                            cdf_v2b: r_b.partition_point(|&d| d <= r) as f64 / n,
                        })
                    }
                };
                Ok(RowValues::Distance {
                    cdf_v2v,
                    pdf_v2v,
                    cdf_v2b: -(-PI * p.lambda_b * r * r).exp_m1(),
                    mc,
                })
            });
            Row {
                value: r,
                window_km: window,
                outcome,
                elapsed: per_row,
            }
        })
        .collect()
}

fn failed_rows(values: &[f64], msg: &str) -> Vec<Row> {
    values
        .iter()
        .map(|&value| Row {
            value,
            window_km: f64::NAN,
            outcome: Err(msg.to_string()),
            elapsed: Duration::ZERO,
        })
        .collect()
}
