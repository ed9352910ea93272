//! Road, vehicle and base-station point processes inside a finite window.
//!
//! Roads are a Poisson line process parameterised by `(theta, y)` on the
//! cylinder `[0, π) × [-R, R]`; vehicles are 1D Poisson processes on the
//! chords those lines cut from the window disc; base stations are a planar
//! Poisson process. The typical receiver sits at the origin on a road added by
//! [`palm_condition`].

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use thiserror::Error;

/// Random stream used by every sampler in this crate.
pub type SimRng = ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("parameter {name} = {value} is out of range: {expected}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum SampleError {
    #[error("realization has no transmitting vehicle; resample required")]
    NoVehicles,
    #[error("realization has no base station; resample required")]
    NoBaseStations,
}

/// Master seed. Per-trial streams are derived with [`RngSeed::stream`], so a
/// trial's randomness depends only on `(seed, trial index)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn stream(self, index: u64) -> SimRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(index);
        rng
    }
}

/// Association bias `B`. `Infinite` always selects the V2V link, `Finite(0.0)`
/// never does.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bias {
    Finite(f64),
    Infinite,
}

impl Bias {
    pub fn value(self) -> f64 {
        match self {
            Bias::Finite(b) => b,
            Bias::Infinite => f64::INFINITY,
        }
    }

    /// `B · r_v^-α_v ≥ r_b^-α_b`
    pub fn prefers_v2v(self, r_v: f64, r_b: f64, alpha_v: f64, alpha_b: f64) -> bool {
        match self {
            Bias::Infinite => true,
            Bias::Finite(b) => b * r_v.powf(-alpha_v) >= r_b.powf(-alpha_b),
        }
    }
}

impl std::fmt::Display for Bias {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Bias::Finite(b) => write!(f, "{b}"),
            Bias::Infinite => f.write_str("inf"),
        }
    }
}

/// Network parameters in linear internal units: Km, 1/Km, 1/Km², mW.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkParams {
    /// Line intensity on the representation cylinder, 1/Km.
    pub lambda_r: f64,
    /// Vehicles per Km of road.
    pub mu_v: f64,
    /// Base stations per Km².
    pub lambda_b: f64,
    pub bias: Bias,
    /// Vehicle transmit power, mW.
    pub p_v: f64,
    pub alpha_v: f64,
    pub alpha_b: f64,
    /// Noise power, mW.
    pub sigma2: f64,
    pub p_tx: f64,
    /// SINR threshold, linear.
    pub z: f64,
}

impl NetworkParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        fn positive(name: &'static str, v: f64) -> Result<(), ParamError> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(ParamError::OutOfRange {
                    name,
                    value: v,
                    expected: "finite and > 0",
                })
            }
        }
        positive("lambda_R", self.lambda_r)?;
        positive("mu_v", self.mu_v)?;
        positive("lambda_b", self.lambda_b)?;
        positive("P_v", self.p_v)?;
        positive("sigma2", self.sigma2)?;
        for (name, a) in [("alpha_v", self.alpha_v), ("alpha_b", self.alpha_b)] {
            if !(a > 1.0 && a.is_finite()) {
                return Err(ParamError::OutOfRange {
                    name,
                    value: a,
                    expected: "finite and > 1",
                });
            }
        }
        if !(0.0..=1.0).contains(&self.p_tx) {
            return Err(ParamError::OutOfRange {
                name: "p_tx",
                value: self.p_tx,
                expected: "in [0, 1]",
            });
        }
        if !(self.z >= 0.0) || self.z.is_infinite() {
            return Err(ParamError::OutOfRange {
                name: "z",
                value: self.z,
                expected: "finite and >= 0",
            });
        }
        if let Bias::Finite(b) = self.bias {
            if !(b >= 0.0) || b.is_infinite() {
                return Err(ParamError::OutOfRange {
                    name: "bias_B",
                    value: b,
                    expected: ">= 0 (use Bias::Infinite for ∞)",
                });
            }
        }
        Ok(())
    }
}

/// A road in representation-space coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    /// Angle of the perpendicular from the origin, `[0, π)`.
    pub theta: f64,
    /// Signed perpendicular distance from the origin, Km.
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// One sampled network. Vehicle offsets `t` are measured along each line from
/// the foot of its perpendicular.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkRealization {
    pub window_radius: f64,
    pub lines: Vec<Line>,
    pub vehicles: Vec<Vec<f64>>,
    pub tx_flags: Vec<Vec<bool>>,
    pub base_stations: Vec<Point2>,
    /// Set by [`palm_condition`].
    pub typical_line_index: Option<usize>,
}

impl NetworkRealization {
    pub fn empty(window_radius: f64) -> Self {
        Self {
            window_radius,
            lines: Vec::new(),
            vehicles: Vec::new(),
            tx_flags: Vec::new(),
            base_stations: Vec::new(),
            typical_line_index: None,
        }
    }

    /// Full Palm-conditioned sample: roads, vehicles on them, the typical
    /// road through the origin, transmit thinning, then base stations.
    pub fn sample(params: &NetworkParams, window_radius: f64, rng: &mut SimRng) -> Self {
        let lines = sample_plp(params.lambda_r, window_radius, rng);
        let vehicles = lines
            .iter()
            .map(|l| sample_vehicles_on_line(l, params.mu_v, window_radius, rng))
            .collect();
        let mut real = Self {
            window_radius,
            lines,
            vehicles,
            tx_flags: Vec::new(),
            base_stations: Vec::new(),
            typical_line_index: None,
        };
        real = palm_condition(real, params.mu_v, rng);
        real.tx_flags = real
            .vehicles
            .iter()
            .map(|v| thin_transmitters(v, params.p_tx, rng))
            .collect();
        real.base_stations = sample_bs(params.lambda_b, window_radius, rng);
        real
    }

    pub fn vehicle_count(&self) -> usize {
        self.vehicles.iter().map(Vec::len).sum()
    }

    /// Iterates over transmitting vehicles as `(line index, offset)`.
    pub fn transmitters(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.vehicles.iter().enumerate().flat_map(move |(i, ts)| {
            ts.iter()
                .enumerate()
                .filter(move |(j, _)| {
                    self.tx_flags
                        .get(i)
                        .and_then(|f| f.get(*j))
                        .copied()
                        .unwrap_or(true)
                })
                .map(move |(_, &t)| (i, t))
        })
    }

    /// Rotates every road by `angle` (mod π). Vehicle offsets stay attached
    /// to their roads; base stations are left alone.
    pub fn rotated(&self, angle: f64) -> Self {
        let mut out = self.clone();
        for l in &mut out.lines {
            l.theta = (l.theta + angle).rem_euclid(PI);
        }
        out
    }
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if !(mean > 0.0) {
        return 0;
    }
    let d = Poisson::new(mean).expect("finite positive Poisson mean");
    let n: f64 = d.sample(rng);
    n as usize
}

/// Poisson line process: count ~ Poisson(2π λ_R R), `(θ, y)` uniform on
/// `[0, π) × [-R, R]`.
pub fn sample_plp<R: Rng + ?Sized>(lambda_r: f64, window_radius: f64, rng: &mut R) -> Vec<Line> {
    let n = poisson_count(2.0 * PI * lambda_r * window_radius, rng);
    (0..n)
        .map(|_| Line {
            theta: rng.random::<f64>() * PI,
            y: (2.0 * rng.random::<f64>() - 1.0) * window_radius,
        })
        .collect()
}

/// 1D Poisson process of intensity `mu` on the chord `|t| ≤ √(R² − y²)`.
pub fn sample_vehicles_on_line<R: Rng + ?Sized>(
    line: &Line,
    mu: f64,
    window_radius: f64,
    rng: &mut R,
) -> Vec<f64> {
    if line.y.abs() >= window_radius {
        return Vec::new();
    }
    let half = (window_radius * window_radius - line.y * line.y).sqrt();
    let n = poisson_count(2.0 * mu * half, rng);
    (0..n)
        .map(|_| (2.0 * rng.random::<f64>() - 1.0) * half)
        .collect()
}

/// Independent Bernoulli(`p_tx`) transmit decision per vehicle.
pub fn thin_transmitters<R: Rng + ?Sized>(vehicles: &[f64], p_tx: f64, rng: &mut R) -> Vec<bool> {
    if p_tx >= 1.0 {
        return vec![true; vehicles.len()];
    }
    if p_tx <= 0.0 {
        return vec![false; vehicles.len()];
    }
    vehicles
        .iter()
        .map(|_| rng.random::<f64>() < p_tx)
        .collect()
}

/// Adds the typical road through the origin (uniform angle) with its own
/// vehicle process over the full chord. Existing roads and points are kept.
/// If the realization was already thinned, the new road's vehicles are all
/// marked as transmitters; [`NetworkRealization::sample`] thins afterwards.
pub fn palm_condition<R: Rng + ?Sized>(
    mut real: NetworkRealization,
    mu: f64,
    rng: &mut R,
) -> NetworkRealization {
    let line = Line {
        theta: rng.random::<f64>() * PI,
        y: 0.0,
    };
    let ts = sample_vehicles_on_line(&line, mu, real.window_radius, rng);
    if real.tx_flags.len() == real.vehicles.len() && !real.tx_flags.is_empty() {
        real.tx_flags.push(vec![true; ts.len()]);
    }
    real.lines.push(line);
    real.vehicles.push(ts);
    real.typical_line_index = Some(real.lines.len() - 1);
    real
}

/// Planar Poisson process of intensity `lambda_b` in the window disc.
pub fn sample_bs<R: Rng + ?Sized>(lambda_b: f64, window_radius: f64, rng: &mut R) -> Vec<Point2> {
    let n = poisson_count(lambda_b * PI * window_radius * window_radius, rng);
    (0..n)
        .map(|_| {
            let r = window_radius * rng.random::<f64>().sqrt();
            let phi = 2.0 * PI * rng.random::<f64>();
            Point2 {
                x: r * phi.cos(),
                y: r * phi.sin(),
            }
        })
        .collect()
}

/// Plane coordinates of the point at offset `t` along `line`.
pub fn to_xy(line: &Line, t: f64) -> Point2 {
    let (s, c) = line.theta.sin_cos();
    Point2 {
        x: line.y * c - t * s,
        y: line.y * s + t * c,
    }
}

/// Distance from the origin of the point at offset `t` on `line`.
pub fn distance_from_origin(line: &Line, t: f64) -> f64 {
    line.y.hypot(t)
}

/// `(r_v, r_b)`: nearest transmitting vehicle and nearest base station, both
/// measured from the origin.
pub fn nearest_distances(real: &NetworkRealization) -> Result<(f64, f64), SampleError> {
    let r_v = real
        .transmitters()
        .map(|(i, t)| distance_from_origin(&real.lines[i], t))
        .fold(f64::INFINITY, f64::min);
    if !r_v.is_finite() {
        return Err(SampleError::NoVehicles);
    }
    let r_b = real
        .base_stations
        .iter()
        .map(|p| p.norm())
        .fold(f64::INFINITY, f64::min);
    if !r_b.is_finite() {
        return Err(SampleError::NoBaseStations);
    }
    Ok((r_v, r_b))
}
