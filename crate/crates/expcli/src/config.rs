//! Experiment files: TOML with `[params]`, `[sweep]`, `[sim]` and `[outputs]`
//! tables, optionally on top of a named preset.
//!
//! ```toml
//! preset = "fig4"          # optional
//! name = "my-run"          # output file stem
//!
//! [params]
//! lambda_R = 0.001         # roads, 1/Km
//! mu_v = "0.1 /km"         # vehicles per Km of road
//! lambda_b = 2e-5          # base stations, 1/Km^2
//! bias_B = 1.0             # or "inf", or "3 dB"
//! P_v = "30 dBm"           # also "mW" / "W"; a bare number is dBm
//! noise_density = "-174 dBm/Hz"
//! bandwidth = "10 MHz"     # or give sigma2 = "-104 dBm" directly
//! alpha_v = 4.0
//! alpha_b = 4.0
//! p_tx = 1.0
//! z = "0 dB"
//!
//! [sweep]
//! parameter = "z_dB"       # z_dB, mu_v, lambda_R, lambda_b, bias_B, r_km
//! values = [-20, -10, 0, 10]
//! # or: start = 1e-3, stop = 1.0, points = 13, spacing = "log"
//!
//! [sim]
//! trials = 100000          # 0 skips the simulation
//! seed = 42
//! window_radius = "auto"   # or a radius such as 500 or "500 km"
//! mode = "origin"           # or "physical"
//! ci_level = 0.95
//! exact_ci = false
//! window_check = true
//!
//! [outputs]
//! formats = ["csv", "svg"]
//! plot = "success"         # success, association or distance
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;
use toml::{Table, Value};
use v2x_core::pointprocess::{Bias, NetworkParams, ParamError};
use v2x_core::simulator::ExclusionMode;

use crate::units::{db_to_linear, dbm_to_mw, noise_dbm, split_quantity};

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("TOML syntax error: {0}")]
    Syntax(String),
    #[error("unknown key `{key}`")]
    UnknownKey { key: String },
    #[error("`{key}`: unit of `{found}` is not one of {expected}")]
    UnitMismatch {
        key: String,
        found: String,
        expected: String,
    },
    #[error("`{key}` = {value} is out of range: {expected}")]
    OutOfRange {
        key: String,
        value: f64,
        expected: &'static str,
    },
    #[error("`{key}`: {detail}")]
    InvalidValue { key: String, detail: String },
    #[error("`{key}` is required")]
    MissingKey { key: String },
    #[error("`sweep.values` is empty")]
    EmptySweep,
    #[error("`sweep.values` must be sorted in increasing order")]
    UnsortedSweep,
    #[error("unknown preset `{name}` (expected one of fig3..fig9 or custom)")]
    UnknownPreset { name: String },
    #[error("unknown sweep parameter `{name}` (expected z_dB, mu_v, lambda_R, lambda_b, bias_B or r_km)")]
    UnknownSweepParameter { name: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
    Custom,
}

impl Preset {
    pub const ALL: [Preset; 8] = [
        Preset::Fig3,
        Preset::Fig4,
        Preset::Fig5,
        Preset::Fig6,
        Preset::Fig7,
        Preset::Fig8,
        Preset::Fig9,
        Preset::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
            Preset::Fig6 => "fig6",
            Preset::Fig7 => "fig7",
            Preset::Fig8 => "fig8",
            Preset::Fig9 => "fig9",
            Preset::Custom => "custom",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| SpecError::UnknownPreset {
                name: s.to_string(),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    ZDb,
    MuV,
    LambdaR,
    LambdaB,
    BiasB,
    /// Distance grid for the nearest-neighbour CDFs.
    RadiusKm,
}

impl SweepParameter {
    pub fn key(self) -> &'static str {
        match self {
            SweepParameter::ZDb => "z_dB",
            SweepParameter::MuV => "mu_v",
            SweepParameter::LambdaR => "lambda_R",
            SweepParameter::LambdaB => "lambda_b",
            SweepParameter::BiasB => "bias_B",
            SweepParameter::RadiusKm => "r_km",
        }
    }

    /// CSV column name including the unit.
    pub fn column(self) -> &'static str {
        match self {
            SweepParameter::ZDb => "z_dB",
            SweepParameter::MuV => "mu_v_per_km",
            SweepParameter::LambdaR => "lambda_R_per_km",
            SweepParameter::LambdaB => "lambda_b_per_km2",
            SweepParameter::BiasB => "bias_B",
            SweepParameter::RadiusKm => "r_km",
        }
    }

    pub fn axis_label(self) -> &'static str {
        match self {
            SweepParameter::ZDb => "SINR threshold z (dB)",
            SweepParameter::MuV => "Vehicle intensity μ_v (1/Km)",
            SweepParameter::LambdaR => "Road intensity λ_R (1/Km)",
            SweepParameter::LambdaB => "BS intensity λ_b (1/Km²)",
            SweepParameter::BiasB => "Association bias B",
            SweepParameter::RadiusKm => "Link distance (Km)",
        }
    }

    pub fn log_scale(self) -> bool {
        !matches!(self, SweepParameter::ZDb | SweepParameter::RadiusKm)
    }

    fn parse(name: &str) -> Result<Self, SpecError> {
        [
            SweepParameter::ZDb,
            SweepParameter::MuV,
            SweepParameter::LambdaR,
            SweepParameter::LambdaB,
            SweepParameter::BiasB,
            SweepParameter::RadiusKm,
        ]
        .into_iter()
        .find(|p| p.key() == name)
        .ok_or_else(|| SpecError::UnknownSweepParameter {
            name: name.to_string(),
        })
    }

    /// `params` with this parameter set to `value` (sweep units).
    pub fn apply(self, params: &NetworkParams, value: f64) -> NetworkParams {
        let mut p = *params;
        match self {
            SweepParameter::ZDb => p.z = db_to_linear(value),
            SweepParameter::MuV => p.mu_v = value,
            SweepParameter::LambdaR => p.lambda_r = value,
            SweepParameter::LambdaB => p.lambda_b = value,
            SweepParameter::BiasB => p.bias = Bias::Finite(value),
            SweepParameter::RadiusKm => {}
        }
        p
    }

    fn check_value(self, v: f64) -> Result<(), SpecError> {
        let (ok, expected) = match self {
            SweepParameter::ZDb => (v.is_finite(), "finite"),
            SweepParameter::BiasB | SweepParameter::RadiusKm => {
                (v.is_finite() && v >= 0.0, "finite and >= 0")
            }
            _ => (v.is_finite() && v > 0.0, "finite and > 0"),
        };
        if ok {
            Ok(())
        } else {
            Err(SpecError::OutOfRange {
                key: "sweep.values".into(),
                value: v,
                expected,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindowSetting {
    /// Smallest `500 · 2^k` Km passing the interference-tail check, per row.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Success,
    Association,
    Distance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSettings {
    /// 0 runs the analytic model only.
    pub trials: u64,
    pub seed: u64,
    pub window: WindowSetting,
    pub mode: ExclusionMode,
    pub ci_level: f64,
    pub exact_ci: bool,
    pub window_check: bool,
}

impl Default for SimSettings {
    fn default() -> Self {
        Self {
            trials: 100_000,
            seed: 42,
            window: WindowSetting::Auto,
            mode: ExclusionMode::OriginCentred,
            ci_level: 0.95,
            exact_ci: false,
            window_check: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub preset: Preset,
    pub name: String,
    pub base: NetworkParams,
    pub sweep: Sweep,
    pub sim: SimSettings,
    pub outputs: Vec<OutputFormat>,
    pub plot: PlotKind,
}

/// `-174 dBm/Hz` thermal noise density.
pub const NOISE_DENSITY_DBM_PER_HZ: f64 = -174.0;
pub const BANDWIDTH_HZ: f64 = 10e6;
pub const TX_POWER_DBM: f64 = 30.0;

/// Parameters shared by every preset before the per-figure overrides.
pub fn default_params() -> NetworkParams {
    NetworkParams {
        lambda_r: 0.005,
        mu_v: 0.005,
        lambda_b: 2e-5,
        bias: Bias::Finite(1.0),
        p_v: dbm_to_mw(TX_POWER_DBM),
        alpha_v: 4.0,
        alpha_b: 4.0,
        sigma2: dbm_to_mw(noise_dbm(NOISE_DENSITY_DBM_PER_HZ, BANDWIDTH_HZ)),
        p_tx: 1.0,
        z: 1.0,
    }
}

/// `n` points from `10^a` to `10^b`.
pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![10f64.powf(a)];
    }
    (0..n)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64))
        .collect()
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

impl ExperimentSpec {
    /// Fully expanded preset.
    pub fn preset(preset: Preset) -> Self {
        let base = default_params();
        let (base, sweep, plot) = match preset {
            Preset::Fig3 => (
                NetworkParams {
                    mu_v: 0.001,
                    lambda_r: 0.005,
                    ..base
                },
                Sweep {
                    parameter: SweepParameter::RadiusKm,
                    values: linspace(0.0, 400.0, 41),
                },
                PlotKind::Distance,
            ),
            Preset::Fig4 => (
                NetworkParams {
                    lambda_r: 0.001,
                    mu_v: 0.1,
                    ..base
                },
                Sweep {
                    parameter: SweepParameter::ZDb,
                    values: (-4..=6).map(|k| 5.0 * k as f64).collect(),
                },
                PlotKind::Success,
            ),
            Preset::Fig5 | Preset::Fig6 => (
                base,
                Sweep {
                    parameter: SweepParameter::MuV,
                    values: logspace(-3.0, 0.0, 13),
                },
                if preset == Preset::Fig6 {
                    PlotKind::Association
                } else {
                    PlotKind::Success
                },
            ),
            Preset::Fig7 => (
                base,
                Sweep {
                    parameter: SweepParameter::LambdaR,
                    values: logspace(-3.0, -1.0, 9),
                },
                PlotKind::Success,
            ),
            Preset::Fig8 => (
                base,
                Sweep {
                    parameter: SweepParameter::LambdaB,
                    values: logspace(-6.0, -3.0, 13),
                },
                PlotKind::Success,
            ),
            Preset::Fig9 => (
                base,
                Sweep {
                    parameter: SweepParameter::BiasB,
                    values: logspace(-2.0, 4.0, 13),
                },
                PlotKind::Success,
            ),
            Preset::Custom => (
                base,
                Sweep {
                    parameter: SweepParameter::ZDb,
                    values: vec![0.0],
                },
                PlotKind::Success,
            ),
        };
        Self {
            preset,
            name: preset.name().to_string(),
            base,
            sweep,
            sim: SimSettings::default(),
            outputs: vec![OutputFormat::Csv, OutputFormat::Svg],
            plot,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self, SpecError> {
        let table: Table = text
            .parse()
            .map_err(|e: toml::de::Error| SpecError::Syntax(e.to_string()))?;
        Self::from_table(&table)
    }

    fn from_table(table: &Table) -> Result<Self, SpecError> {
        for key in table.keys() {
            if !["preset", "name", "params", "sweep", "sim", "outputs"].contains(&key.as_str()) {
                return Err(SpecError::UnknownKey { key: key.clone() });
            }
        }
        let preset = match table.get("preset") {
            Some(v) => string("preset", v)?.parse()?,
            None => Preset::Custom,
        };
        let mut spec = Self::preset(preset);
        if let Some(v) = table.get("name") {
            spec.name = string("name", v)?.to_string();
            if spec.name.is_empty() || spec.name.contains(['/', '\\']) {
                return Err(SpecError::InvalidValue {
                    key: "name".into(),
                    detail: "must be a non-empty file stem".into(),
                });
            }
        }
        if let Some(v) = table.get("params") {
            apply_params(&mut spec.base, section("params", v)?)?;
        }
        match table.get("sweep") {
            Some(v) => spec.sweep = parse_sweep(section("sweep", v)?)?,
            None if preset == Preset::Custom => {
                return Err(SpecError::MissingKey {
                    key: "sweep".into(),
                })
            }
            None => {}
        }
        if spec.sweep.parameter == SweepParameter::RadiusKm {
            spec.plot = PlotKind::Distance;
        } else if spec.plot == PlotKind::Distance {
            spec.plot = PlotKind::Success;
        }
        if let Some(v) = table.get("sim") {
            apply_sim(&mut spec.sim, section("sim", v)?)?;
        }
        if let Some(v) = table.get("outputs") {
            apply_outputs(&mut spec, section("outputs", v)?)?;
        }
        spec.validate()?;
        Ok(spec)
    }

    /// Range checks on the assembled spec.
    pub fn validate(&self) -> Result<(), SpecError> {
        self.base.validate().map_err(|e| match e {
            ParamError::OutOfRange {
                name,
                value,
                expected,
            } => SpecError::OutOfRange {
                key: format!("params.{name}"),
                value,
                expected,
            },
        })?;
        if self.base.alpha_v <= 2.0 || self.base.alpha_b <= 2.0 {
            let (key, value) = if self.base.alpha_v <= 2.0 {
                ("params.alpha_v", self.base.alpha_v)
            } else {
                ("params.alpha_b", self.base.alpha_b)
            };
            return Err(SpecError::OutOfRange {
                key: key.into(),
                value,
                expected: "> 2 (mean interference is infinite otherwise)",
            });
        }
        if self.sweep.values.is_empty() {
            return Err(SpecError::EmptySweep);
        }
        for &v in &self.sweep.values {
            self.sweep.parameter.check_value(v)?;
        }
        if self.sweep.values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SpecError::UnsortedSweep);
        }
        let s = &self.sim;
        if !(s.ci_level > 0.0 && s.ci_level < 1.0) {
            return Err(SpecError::OutOfRange {
                key: "sim.ci_level".into(),
                value: s.ci_level,
                expected: "in (0, 1)",
            });
        }
        if let WindowSetting::Fixed(w) = s.window {
            if !(w > 0.0 && w.is_finite()) {
                return Err(SpecError::OutOfRange {
                    key: "sim.window_radius".into(),
                    value: w,
                    expected: "finite and > 0",
                });
            }
        }
        Ok(())
    }
}

/// Reads and validates an experiment file.
pub fn load_spec(path: &Path) -> Result<ExperimentSpec, SpecError> {
    let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    ExperimentSpec::from_toml_str(&text)
}

fn section<'a>(key: &str, v: &'a Value) -> Result<&'a Table, SpecError> {
    v.as_table().ok_or_else(|| SpecError::InvalidValue {
        key: key.into(),
        detail: "must be a table".into(),
    })
}

fn string<'a>(key: &str, v: &'a Value) -> Result<&'a str, SpecError> {
    v.as_str().ok_or_else(|| SpecError::InvalidValue {
        key: key.into(),
        detail: "must be a string".into(),
    })
}

fn number(key: &str, v: &Value) -> Result<f64, SpecError> {
    match v {
        Value::Integer(i) => Ok(*i as f64),
        Value::Float(f) => Ok(*f),
        _ => Err(SpecError::InvalidValue {
            key: key.into(),
            detail: "must be a number".into(),
        }),
    }
}

fn boolean(key: &str, v: &Value) -> Result<bool, SpecError> {
    v.as_bool().ok_or_else(|| SpecError::InvalidValue {
        key: key.into(),
        detail: "must be true or false".into(),
    })
}

fn unsigned(key: &str, v: &Value) -> Result<u64, SpecError> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as u64),
        Value::Integer(i) => Err(SpecError::OutOfRange {
            key: key.into(),
            value: *i as f64,
            expected: "a non-negative integer",
        }),
        _ => Err(SpecError::InvalidValue {
            key: key.into(),
            detail: "must be a non-negative integer".into(),
        }),
    }
}

type Conversion = (&'static str, fn(f64) -> f64);

fn identity(x: f64) -> f64 {
    x
}

const PER_KM: &[Conversion] = &[
    ("", identity),
    ("/km", identity),
    ("1/km", identity),
    ("per km", identity),
];
const PER_KM2: &[Conversion] = &[
    ("", identity),
    ("/km2", identity),
    ("/km^2", identity),
    ("1/km2", identity),
    ("1/km^2", identity),
    ("per km2", identity),
];
const POWER: &[Conversion] = &[
    ("", dbm_to_mw),
    ("dBm", dbm_to_mw),
    ("mW", identity),
    ("W", |w| w * 1e3),
];
const DENSITY: &[Conversion] = &[("", identity), ("dBm/Hz", identity)];
const FREQUENCY: &[Conversion] = &[
    ("", identity),
    ("Hz", identity),
    ("kHz", |f| f * 1e3),
    ("MHz", |f| f * 1e6),
    ("GHz", |f| f * 1e9),
];
const RATIO_DB: &[Conversion] = &[("", db_to_linear), ("dB", db_to_linear)];
const DISTANCE: &[Conversion] = &[("", identity), ("km", identity), ("m", |m| m / 1e3)];

/// Number or `"<number> <unit>"`; a bare number uses the first (empty) unit.
fn quantity(key: &str, v: &Value, units: &[Conversion]) -> Result<f64, SpecError> {
    let (x, unit) = match v {
        Value::Integer(_) | Value::Float(_) => (number(key, v)?, ""),
        Value::String(s) => split_quantity(s).ok_or_else(|| SpecError::InvalidValue {
            key: key.into(),
            detail: format!("`{s}` is not a number with an optional unit"),
        })?,
        _ => {
            return Err(SpecError::InvalidValue {
                key: key.into(),
                detail: "must be a number or a string such as \"30 dBm\"".into(),
            })
        }
    };
    let exact = units.iter().find(|(u, _)| *u == unit);
    let loose = || {
        units.iter().find(|(u, _)| {
            u.eq_ignore_ascii_case(unit)
                && !u.eq_ignore_ascii_case("mw")
                && !u.eq_ignore_ascii_case("m")
        })
    };
    match exact.or_else(loose) {
        Some((_, convert)) => Ok(convert(x)),
        None => Err(SpecError::UnitMismatch {
            key: key.into(),
            found: unit.to_string(),
            expected: units
                .iter()
                .filter(|(u, _)| !u.is_empty())
                .map(|(u, _)| format!("`{u}`"))
                .collect::<Vec<_>>()
                .join(", "),
        }),
    }
}

fn apply_params(p: &mut NetworkParams, t: &Table) -> Result<(), SpecError> {
    let mut density = None;
    let mut bandwidth = None;
    let mut sigma2 = None;
    for (k, v) in t {
        let key = format!("params.{k}");
        match k.as_str() {
            "lambda_R" => p.lambda_r = quantity(&key, v, PER_KM)?,
            "mu_v" => p.mu_v = quantity(&key, v, PER_KM)?,
            "lambda_b" => p.lambda_b = quantity(&key, v, PER_KM2)?,
            "bias_B" => p.bias = bias(&key, v)?,
            "P_v" => p.p_v = quantity(&key, v, POWER)?,
            "alpha_v" => p.alpha_v = number(&key, v)?,
            "alpha_b" => p.alpha_b = number(&key, v)?,
            "p_tx" => {
                let x = number(&key, v)?;
                if !(x > 0.0 && x <= 1.0) {
                    return Err(SpecError::OutOfRange {
                        key,
                        value: x,
                        expected: "in (0, 1]",
                    });
                }
                p.p_tx = x;
            }
            "z" => p.z = quantity(&key, v, RATIO_DB)?,
            "sigma2" => sigma2 = Some(quantity(&key, v, POWER)?),
            "noise_density" => density = Some(quantity(&key, v, DENSITY)?),
            "bandwidth" => {
                let b = quantity(&key, v, FREQUENCY)?;
                if !(b > 0.0 && b.is_finite()) {
                    return Err(SpecError::OutOfRange {
                        key,
                        value: b,
                        expected: "finite and > 0",
                    });
                }
                bandwidth = Some(b);
            }
            _ => return Err(SpecError::UnknownKey { key }),
        }
    }
    match (sigma2, density.is_some() || bandwidth.is_some()) {
        (Some(_), true) => {
            return Err(SpecError::InvalidValue {
                key: "params.sigma2".into(),
                detail: "give either sigma2 or noise_density/bandwidth, not both".into(),
            })
        }
        (Some(s), false) => p.sigma2 = s,
        (None, true) => {
            let dbm = noise_dbm(
                density.unwrap_or(NOISE_DENSITY_DBM_PER_HZ),
                bandwidth.unwrap_or(BANDWIDTH_HZ),
            );
            p.sigma2 = dbm_to_mw(dbm);
        }
        (None, false) => {}
    }
    Ok(())
}

fn bias(key: &str, v: &Value) -> Result<Bias, SpecError> {
    if let Value::String(s) = v {
        if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") {
            return Ok(Bias::Infinite);
        }
    }
    let b = quantity(key, v, &[("", identity), ("dB", db_to_linear)])?;
    if !(b >= 0.0) || b.is_infinite() {
        return Err(SpecError::OutOfRange {
            key: key.into(),
            value: b,
            expected: "finite and >= 0, or \"inf\"",
        });
    }
    Ok(Bias::Finite(b))
}

fn parse_sweep(t: &Table) -> Result<Sweep, SpecError> {
    let mut parameter = None;
    let mut values = None;
    let (mut start, mut stop, mut points, mut spacing) = (None, None, None, "linear".to_string());
    for (k, v) in t {
        let key = format!("sweep.{k}");
        match k.as_str() {
            "parameter" => parameter = Some(SweepParameter::parse(string(&key, v)?)?),
            "values" => {
                let arr = v.as_array().ok_or_else(|| SpecError::InvalidValue {
                    key: key.clone(),
                    detail: "must be an array of numbers".into(),
                })?;
                values = Some(
                    arr.iter()
                        .map(|x| number(&key, x))
                        .collect::<Result<Vec<_>, _>>()?,
                );
            }
            "start" => start = Some(number(&key, v)?),
            "stop" => stop = Some(number(&key, v)?),
            "points" => points = Some(unsigned(&key, v)?),
            "spacing" => {
                spacing = string(&key, v)?.to_string();
                if spacing != "linear" && spacing != "log" {
                    return Err(SpecError::InvalidValue {
                        key,
                        detail: "must be \"linear\" or \"log\"".into(),
                    });
                }
            }
            _ => return Err(SpecError::UnknownKey { key }),
        }
    }
    let parameter = parameter.ok_or(SpecError::MissingKey {
        key: "sweep.parameter".into(),
    })?;
    let values = match (values, start, stop, points) {
        (Some(v), None, None, None) => v,
        (None, Some(a), Some(b), Some(n)) => {
            if n == 0 {
                return Err(SpecError::EmptySweep);
            }
            if spacing == "log" {
                if !(a > 0.0 && b > 0.0) {
                    return Err(SpecError::OutOfRange {
                        key: "sweep.start".into(),
                        value: a.min(b),
                        expected: "> 0 for log spacing",
                    });
                }
                logspace(a.log10(), b.log10(), n as usize)
            } else {
                linspace(a, b, n as usize)
            }
        }
        (None, None, None, None) => {
            return Err(SpecError::MissingKey {
                key: "sweep.values".into(),
            })
        }
        _ => {
            return Err(SpecError::InvalidValue {
                key: "sweep".into(),
                detail: "give either `values` or all of `start`, `stop`, `points`".into(),
            })
        }
    };
    Ok(Sweep { parameter, values })
}

fn apply_sim(s: &mut SimSettings, t: &Table) -> Result<(), SpecError> {
    for (k, v) in t {
        let key = format!("sim.{k}");
        match k.as_str() {
            "trials" => s.trials = unsigned(&key, v)?,
            "seed" => s.seed = unsigned(&key, v)?,
            "window_radius" => {
                s.window = match v {
                    Value::String(x) if x == "auto" => WindowSetting::Auto,
                    _ => WindowSetting::Fixed(quantity(&key, v, DISTANCE)?),
                }
            }
            "mode" => s.mode = parse_mode(&key, string(&key, v)?)?,
            "ci_level" => s.ci_level = number(&key, v)?,
            "exact_ci" => s.exact_ci = boolean(&key, v)?,
            "window_check" => s.window_check = boolean(&key, v)?,
            _ => return Err(SpecError::UnknownKey { key }),
        }
    }
    Ok(())
}

pub fn parse_mode(key: &str, s: &str) -> Result<ExclusionMode, SpecError> {
    match s {
        "origin" => Ok(ExclusionMode::OriginCentred),
        "physical" => Ok(ExclusionMode::Physical),
        _ => Err(SpecError::InvalidValue {
            key: key.into(),
            detail: format!("`{s}` is not \"origin\" or \"physical\""),
        }),
    }
}

fn apply_outputs(spec: &mut ExperimentSpec, t: &Table) -> Result<(), SpecError> {
    for (k, v) in t {
        let key = format!("outputs.{k}");
        match k.as_str() {
            "formats" => {
                let arr = v.as_array().ok_or_else(|| SpecError::InvalidValue {
                    key: key.clone(),
                    detail: "must be an array of strings".into(),
                })?;
                spec.outputs = arr
                    .iter()
                    .map(|x| match string(&key, x)? {
                        "csv" => Ok(OutputFormat::Csv),
                        "svg" => Ok(OutputFormat::Svg),
                        other => Err(SpecError::InvalidValue {
                            key: key.clone(),
                            detail: format!("unknown format `{other}`"),
                        }),
                    })
                    .collect::<Result<_, _>>()?;
            }
            "plot" => {
                spec.plot = match string(&key, v)? {
                    "success" => PlotKind::Success,
                    "association" => PlotKind::Association,
                    "distance" => PlotKind::Distance,
                    other => {
                        return Err(SpecError::InvalidValue {
                            key,
                            detail: format!("unknown plot `{other}`"),
                        })
                    }
                };
                let distance_sweep = spec.sweep.parameter == SweepParameter::RadiusKm;
                if (spec.plot == PlotKind::Distance) != distance_sweep {
                    return Err(SpecError::InvalidValue {
                        key: "outputs.plot".into(),
                        detail: "the distance plot goes with an r_km sweep and only with it".into(),
                    });
                }
            }
            _ => return Err(SpecError::UnknownKey { key }),
        }
    }
    Ok(())
}
