//! Analytic distance laws, association probabilities, interference Laplace
//! transforms and success probabilities for the typical receiver.
//!
//! All quantities are in linear units (Km, mW). Interference at a vehicle
//! receiver uses `alpha_v`, at a base-station receiver `alpha_b`.
//!
//! The Laplace transform over all roads other than the one through the
//! receiver is
//!
//! ```text
//! L_Iv(s|r) = exp(-2πλ_R [ ∫_0^r (1 - L_in(s|y,r)) dy + ∫_r^R (1 - L_out(s|y)) dy ])
//! ```
//!
//! i.e. the probability generating functional of the line process with
//! intensity λ_R on `[0, π) × [-R, R]`. [`laplace_all_roads_as_printed`]
//! keeps the alternative positive-exponent form for comparison only.

use std::f64::consts::{PI, SQRT_2};

use thiserror::Error;

use crate::pointprocess::{Bias, NetworkParams, ParamError};
use crate::specfun::{
    gauss_2f1, integrate, integrate_tail, struve_m, QuadratureError, QuadratureSpec, SpecfunError,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    #[error("{op}: {detail}")]
    Domain { op: &'static str, detail: String },
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error("{op}: {source}")]
    Quadrature {
        op: &'static str,
        #[source]
        source: QuadratureError,
    },
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
}

fn quad_err(op: &'static str) -> impl Fn(QuadratureError) -> AnalyticError {
    move |source| AnalyticError::Quadrature { op, source }
}

fn domain(op: &'static str, detail: impl Into<String>) -> AnalyticError {
    AnalyticError::Domain {
        op,
        detail: detail.into(),
    }
}

/// Tightening applied to integrals evaluated inside another integrand.
const NESTED_TIGHTENING: f64 = 100.0;

/// Arguments of the conditional interference Laplace transforms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceArg {
    /// Laplace variable, `z / (P_v r^-α)` at the call sites.
    pub s: f64,
    /// Exclusion radius around the receiver, Km.
    pub r: f64,
    pub alpha: f64,
    pub mu_v: f64,
    pub lambda_r: f64,
    /// Outer radius of the road field, Km; may be infinite.
    pub window_radius: f64,
    /// Interferer transmit power, mW.
    pub p_v: f64,
}

impl LaplaceArg {
    /// Argument for a link of length `r` at threshold `z`: `s = z r^α / P_v`.
    pub fn for_link(
        z: f64,
        r: f64,
        alpha: f64,
        params: &NetworkParams,
        window_radius: f64,
    ) -> Self {
        Self {
            s: z * r.powf(alpha) / params.p_v,
            r,
            alpha,
            mu_v: params.mu_v,
            lambda_r: params.lambda_r,
            window_radius,
            p_v: params.p_v,
        }
    }

    fn validate(&self, op: &'static str) -> Result<(), AnalyticError> {
        if !(self.s >= 0.0) || self.s.is_infinite() {
            return Err(domain(
                op,
                format!("s = {} must be finite and >= 0", self.s),
            ));
        }
        if !(self.r >= 0.0) {
            return Err(domain(op, format!("r = {} must be >= 0", self.r)));
        }
        if !(self.alpha > 1.0) {
            return Err(domain(op, format!("alpha = {} must be > 1", self.alpha)));
        }
        if !(self.mu_v >= 0.0) || !(self.lambda_r >= 0.0) || !(self.p_v > 0.0) {
            return Err(domain(op, "mu_v, lambda_R must be >= 0 and P_v > 0"));
        }
        if !(self.window_radius > 0.0) {
            return Err(domain(op, "window radius must be > 0"));
        }
        Ok(())
    }

    /// `s · P_v`
    fn sp(&self) -> f64 {
        self.s * self.p_v
    }
}

/// `∫_{t0}^∞ [1 - 1/(1 + c (y² + t²)^{-α/2})] dt` for one road at distance `y`.
fn road_exponent(
    c: f64,
    alpha: f64,
    y: f64,
    t0: f64,
    quad: &QuadratureSpec,
) -> Result<f64, QuadratureError> {
    if c == 0.0 {
        return Ok(0.0);
    }
    let y2 = y * y;
    let half_alpha = 0.5 * alpha;
    let f = |t: f64| c / ((y2 + t * t).powf(half_alpha) + c);
    let mut scale = c.powf(1.0 / alpha).max(y.abs());
    if !(scale > 0.0) || !scale.is_finite() {
        scale = 1.0;
    }
    integrate_tail(f, t0, scale, quad)
}

/// Road not meeting the exclusion disc (`y ≥ r`), integral form.
pub fn laplace_road_outside(
    arg: &LaplaceArg,
    y: f64,
    quad: &QuadratureSpec,
) -> Result<f64, AnalyticError> {
    const OP: &str = "laplace_road_outside";
    arg.validate(OP)?;
    let y = y.abs();
    if y < arg.r {
        return Err(domain(
            OP,
            format!("road distance {y} is inside the exclusion radius {}", arg.r),
        ));
    }
    if y.is_infinite() {
        return Ok(1.0);
    }
    let j = road_exponent(arg.sp(), arg.alpha, y, 0.0, quad).map_err(quad_err(OP))?;
    Ok((-2.0 * arg.mu_v * j).exp())
}

/// Closed form of [`laplace_road_outside`] for `alpha = 4`.
pub fn laplace_road_outside_alpha4(arg: &LaplaceArg, y: f64) -> Result<f64, AnalyticError> {
    const OP: &str = "laplace_road_outside_alpha4";
    arg.validate(OP)?;
    if arg.alpha != 4.0 {
        return Err(domain(
            OP,
            format!("closed form needs alpha = 4, got {}", arg.alpha),
        ));
    }
    let c = arg.sp();
    if c == 0.0 {
        return Ok(1.0);
    }
    let y2 = y * y;
    let rc = c.sqrt();
    let exponent = arg.mu_v * PI * rc * (0.5 * (rc / y2).atan()).sin() / (y2 * y2 + c).powf(0.25);
    Ok((-exponent).exp())
}

/// Road crossing the exclusion disc (`y < r`): interferers only beyond the
/// chord half-length `√(r² − y²)`.
pub fn laplace_road_inside(
    arg: &LaplaceArg,
    y: f64,
    quad: &QuadratureSpec,
) -> Result<f64, AnalyticError> {
    const OP: &str = "laplace_road_inside";
    arg.validate(OP)?;
    let y = y.abs();
    if y > arg.r {
        return Err(domain(
            OP,
            format!(
                "road distance {y} is outside the exclusion radius {}",
                arg.r
            ),
        ));
    }
    let t0 = (arg.r * arg.r - y * y).max(0.0).sqrt();
    let j = road_exponent(arg.sp(), arg.alpha, y, t0, quad).map_err(quad_err(OP))?;
    Ok((-2.0 * arg.mu_v * j).exp())
}

fn check_origin_args(
    op: &'static str,
    z: f64,
    r: f64,
    alpha: f64,
    mu_v: f64,
) -> Result<(), AnalyticError> {
    if !(z >= 0.0) || z.is_infinite() {
        return Err(domain(
            op,
            format!("threshold z = {z} must be finite and >= 0"),
        ));
    }
    if !(r >= 0.0) || r.is_infinite() {
        return Err(domain(op, format!("r = {r} must be finite and >= 0")));
    }
    if !(alpha > 1.0) {
        return Err(domain(op, format!("alpha = {alpha} must be > 1")));
    }
    if !(mu_v >= 0.0) {
        return Err(domain(op, format!("mu_v = {mu_v} must be >= 0")));
    }
    Ok(())
}

/// Road through the receiver, interferers beyond `±r`, with `s P_v = z r^α`:
/// `exp(-2 r z μ 2F1(1, (α-1)/α; 2-1/α; -z) / (α-1))`.
pub fn laplace_origin_road(z: f64, r: f64, alpha: f64, mu_v: f64) -> Result<f64, AnalyticError> {
    check_origin_args("laplace_origin_road", z, r, alpha, mu_v)?;
    if z == 0.0 || r == 0.0 || mu_v == 0.0 {
        return Ok(1.0);
    }
    let f = gauss_2f1(1.0, (alpha - 1.0) / alpha, 2.0 - 1.0 / alpha, -z)?;
    Ok((-2.0 * r * z * mu_v * f / (alpha - 1.0)).exp())
}

/// Integral form of [`laplace_origin_road`]:
/// `exp(-2μ ∫_r^∞ [1 - 1/(1 + z r^α t^-α)] dt)`.
pub fn laplace_origin_road_integral(
    z: f64,
    r: f64,
    alpha: f64,
    mu_v: f64,
    quad: &QuadratureSpec,
) -> Result<f64, AnalyticError> {
    const OP: &str = "laplace_origin_road_integral";
    check_origin_args(OP, z, r, alpha, mu_v)?;
    if z == 0.0 || r == 0.0 || mu_v == 0.0 {
        return Ok(1.0);
    }
    let c = z * r.powf(alpha);
    let j = integrate_tail(|t: f64| c / (t.powf(alpha) + c), r, r, quad).map_err(quad_err(OP))?;
    Ok((-2.0 * mu_v * j).exp())
}

/// Elementary closed form of [`laplace_origin_road`] for `alpha = 4`.
pub fn laplace_origin_road_alpha4(z: f64, r: f64, mu_v: f64) -> Result<f64, AnalyticError> {
    check_origin_args("laplace_origin_road_alpha4", z, r, 4.0, mu_v)?;
    if z == 0.0 || r == 0.0 || mu_v == 0.0 {
        return Ok(1.0);
    }
    let q = z.powf(0.25);
    let acoth = |x: f64| 0.5 * ((x + 1.0) / (x - 1.0)).ln();
    let bracket = -(SQRT_2 / q + 1.0).atan() + (1.0 - SQRT_2 / q).atan()
        - acoth((z.sqrt() + 1.0) / (SQRT_2 * q))
        + PI;
    Ok((-(r * q * mu_v / SQRT_2) * bracket).exp())
}

/// `∫_0^R (1 - L_road(y)) dy` split at the exclusion radius.
fn all_roads_integral(arg: &LaplaceArg, quad: &QuadratureSpec) -> Result<f64, AnalyticError> {
    let c = arg.sp();
    if c == 0.0 || arg.mu_v == 0.0 {
        return Ok(0.0);
    }
    let inner = quad.tightened(NESTED_TIGHTENING);
    let two_mu = 2.0 * arg.mu_v;
    let r = arg.r;
    let big_r = arg.window_radius;

    // 1 - L = -expm1(-2μ J); evaluated directly so that quadrature sees no NaN
    // and reports failures in the outer rule.
    let one_minus = |y: f64, t0: f64| -> f64 {
        match road_exponent(c, arg.alpha, y, t0, &inner) {
            Ok(j) => -(-two_mu * j).exp_m1(),
            Err(_) => f64::NAN,
        }
    };

    let crossing_upper = r.min(big_r);
    let crossing = if crossing_upper > 0.0 {
        integrate(
            |y: f64| one_minus(y, (r * r - y * y).max(0.0).sqrt()),
            0.0,
            crossing_upper,
            quad,
        )
        .map_err(|source| AnalyticError::Quadrature {
            op: "laplace_all_roads (roads crossing the exclusion disc)",
            source,
        })?
    } else {
        0.0
    };

    let outside = if big_r > r {
        let f = |y: f64| one_minus(y, 0.0);
        let res = if big_r.is_infinite() {
            let scale = r.max(c.powf(1.0 / arg.alpha)).max(1e-9);
            integrate_tail(f, r, scale, quad)
        } else {
            integrate(f, r, big_r, quad)
        };
        res.map_err(|source| AnalyticError::Quadrature {
            op: "laplace_all_roads (roads outside the exclusion disc)",
            source,
        })?
    } else {
        0.0
    };
    Ok(crossing + outside)
}

/// Interference from every road except the one through the receiver.
pub fn laplace_all_roads(arg: &LaplaceArg, quad: &QuadratureSpec) -> Result<f64, AnalyticError> {
    arg.validate("laplace_all_roads")?;
    let total = all_roads_integral(arg, quad)?;
    Ok((-2.0 * PI * arg.lambda_r * total).exp())
}

/// The same integrals with a positive exponent and a `2 μ λ_R` prefactor.
/// This is not a Laplace transform (it exceeds 1 whenever `s > 0`) and is kept
/// only so the two forms can be compared against simulation.
pub fn laplace_all_roads_as_printed(
    arg: &LaplaceArg,
    quad: &QuadratureSpec,
) -> Result<f64, AnalyticError> {
    arg.validate("laplace_all_roads_as_printed")?;
    let total = all_roads_integral(arg, quad)?;
    Ok((2.0 * arg.mu_v * arg.lambda_r * total).exp())
}

/// Nearest-base-station distance density `2πλ_b r e^{-πλ_b r²}`.
pub fn v2b_pdf(r_b: f64, lambda_b: f64) -> Result<f64, AnalyticError> {
    if !(r_b >= 0.0) {
        return Err(domain("v2b_pdf", format!("r_b = {r_b} must be >= 0")));
    }
    Ok(2.0 * PI * lambda_b * r_b * (-PI * lambda_b * r_b * r_b).exp())
}

/// Per-mode and combined success probabilities at one threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuccessBreakdown {
    /// Joint probability of selecting V2V and succeeding.
    pub p_v2v_success: f64,
    /// Joint probability of selecting V2B and succeeding.
    pub p_v2b_success: f64,
    pub p_v2v_assoc: f64,
    pub p_v2b_assoc: f64,
    pub p_v2x: f64,
    /// V2V without a cellular fallback.
    pub p_v2v_only: f64,
}

/// Analytic model for one parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Model {
    pub params: NetworkParams,
    /// Outer radius of the road field in the all-roads transform.
    pub window_radius: f64,
    pub quad: QuadratureSpec,
}

impl Model {
    pub fn new(params: NetworkParams, window_radius: f64) -> Result<Self, AnalyticError> {
        params.validate()?;
        if !(window_radius > 0.0) {
            return Err(domain(
                "Model::new",
                format!("window radius {window_radius} must be > 0"),
            ));
        }
        Ok(Self {
            params,
            window_radius,
            quad: QuadratureSpec::default(),
        })
    }

    pub fn with_quadrature(mut self, quad: QuadratureSpec) -> Self {
        self.quad = quad;
        self
    }

    /// `2πλ_R ∫_0^r (1 - e^{-2μ√(r²-y²)}) dy + 2μr`, integrated in the angle
    /// `y = r sin φ` so the chord length is smooth.
    fn void_exponent(&self, r: f64, quad: &QuadratureSpec) -> Result<f64, AnalyticError> {
        if r == 0.0 {
            return Ok(0.0);
        }
        if r.is_infinite() {
            return Ok(f64::INFINITY);
        }
        let mu = self.params.mu_v;
        let chord = integrate(
            |phi: f64| {
                let half = r * phi.cos();
                -(-2.0 * mu * half).exp_m1() * half
            },
            0.0,
            std::f64::consts::FRAC_PI_2,
            quad,
        )
        .map_err(quad_err("v2v_cdf"))?;
        Ok(2.0 * PI * self.params.lambda_r * chord + 2.0 * mu * r)
    }

    /// Probability that the disc of radius `r` holds no vehicle.
    pub fn v2v_ccdf(&self, r_v: f64) -> Result<f64, AnalyticError> {
        if !(r_v >= 0.0) {
            return Err(domain("v2v_ccdf", format!("r_v = {r_v} must be >= 0")));
        }
        Ok((-self.void_exponent(r_v, &self.quad)?).exp())
    }

    /// CDF of the nearest-vehicle distance.
    pub fn v2v_cdf(&self, r_v: f64) -> Result<f64, AnalyticError> {
        if !(r_v >= 0.0) {
            return Err(domain("v2v_cdf", format!("r_v = {r_v} must be >= 0")));
        }
        Ok(-(-self.void_exponent(r_v, &self.quad)?).exp_m1())
    }

    /// [`Model::v2v_cdf`] with caller-chosen tolerances.
    pub fn v2v_cdf_with(&self, r_v: f64, quad: &QuadratureSpec) -> Result<f64, AnalyticError> {
        if !(r_v >= 0.0) {
            return Err(domain("v2v_cdf", format!("r_v = {r_v} must be >= 0")));
        }
        Ok(-(-self.void_exponent(r_v, quad)?).exp_m1())
    }

    /// Density of the nearest-vehicle distance in Bessel/Struve closed form.
    pub fn v2v_pdf(&self, r_v: f64) -> Result<f64, AnalyticError> {
        if !(r_v >= 0.0) {
            return Err(domain("v2v_pdf", format!("r_v = {r_v} must be >= 0")));
        }
        if r_v.is_infinite() {
            return Ok(0.0);
        }
        let mu = self.params.mu_v;
        let lr = self.params.lambda_r;
        let x = 2.0 * r_v * mu;
        let i0_minus_l0 = -struve_m(0, x)?;
        let lm1_minus_i1 = struve_m(-1, x)?;
        let rate = 2.0 * PI * PI * lr * r_v * mu * i0_minus_l0 + 2.0 * mu;
        let exponent = -2.0 * PI * lr * r_v + PI * PI * lr * r_v * lm1_minus_i1 - 2.0 * r_v * mu;
        Ok(rate * exponent.exp())
    }

    /// Quantile of the nearest-vehicle distance.
    pub fn v2v_quantile(&self, p: f64) -> Result<f64, AnalyticError> {
        if !(p > 0.0 && p < 1.0) {
            return Err(domain("v2v_quantile", format!("p = {p} must be in (0, 1)")));
        }
        let target = -(1.0 - p).ln();
        let mut hi = 1.0 / (2.0 * self.params.mu_v);
        while self.void_exponent(hi, &self.quad)? < target {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.void_exponent(mid, &self.quad)? < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-10 * hi {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    fn rb_scale(&self) -> f64 {
        1.0 / (PI * self.params.lambda_b).sqrt()
    }

    /// Radius `r_v^{α_v/α_b} B^{-1/α_b}` that must be free of base stations.
    pub fn assoc_v2v_given_rv(&self, r_v: f64) -> Result<f64, AnalyticError> {
        if !(r_v >= 0.0) {
            return Err(domain(
                "assoc_v2v_given_rv",
                format!("r_v = {r_v} must be >= 0"),
            ));
        }
        let p = &self.params;
        match p.bias {
            Bias::Infinite => Ok(1.0),
            Bias::Finite(0.0) => Ok(0.0),
            Bias::Finite(b) => {
                let rho = r_v.powf(p.alpha_v / p.alpha_b) * b.powf(-1.0 / p.alpha_b);
                Ok((-PI * p.lambda_b * rho * rho).exp())
            }
        }
    }

    /// Unconditional probability of selecting the V2V link.
    pub fn assoc_v2v(&self) -> Result<f64, AnalyticError> {
        match self.params.bias {
            Bias::Infinite => return Ok(1.0),
            Bias::Finite(0.0) => return Ok(0.0),
            _ => {}
        }
        let scale = self.v2v_quantile(0.5)?;
        self.integrate_rv("assoc_v2v", scale, |r| {
            Ok(self.assoc_v2v_given_rv(r)? * self.v2v_pdf(r)?)
        })
    }

    /// Probability that no vehicle lies within `B^{1/α_v} r_b^{α_b/α_v}`.
    pub fn assoc_v2b_given_rb(&self, r_b: f64) -> Result<f64, AnalyticError> {
        if !(r_b >= 0.0) {
            return Err(domain(
                "assoc_v2b_given_rb",
                format!("r_b = {r_b} must be >= 0"),
            ));
        }
        let p = &self.params;
        match p.bias {
            Bias::Infinite => Ok(0.0),
            Bias::Finite(b) => {
                let rho = b.powf(1.0 / p.alpha_v) * r_b.powf(p.alpha_b / p.alpha_v);
                self.v2v_ccdf(rho)
            }
        }
    }

    /// Unconditional probability of selecting the V2B link.
    pub fn assoc_v2b(&self) -> Result<f64, AnalyticError> {
        match self.params.bias {
            Bias::Infinite => return Ok(0.0),
            Bias::Finite(0.0) => return Ok(1.0),
            _ => {}
        }
        self.integrate_rb("assoc_v2b", |r| {
            Ok(self.assoc_v2b_given_rb(r)? * v2b_pdf(r, self.params.lambda_b)?)
        })
    }

    fn integrate_rv<F>(&self, op: &'static str, scale: f64, f: F) -> Result<f64, AnalyticError>
    where
        F: Fn(f64) -> Result<f64, AnalyticError>,
    {
        integrate_fallible(op, 0.0, scale, &self.quad, f)
    }

    fn integrate_rb<F>(&self, op: &'static str, f: F) -> Result<f64, AnalyticError>
    where
        F: Fn(f64) -> Result<f64, AnalyticError>,
    {
        integrate_fallible(op, 0.0, self.rb_scale(), &self.quad, f)
    }

    fn conditional_success(
        &self,
        z: f64,
        r: f64,
        alpha: f64,
        op: &'static str,
    ) -> Result<f64, AnalyticError> {
        if !(z >= 0.0) || z.is_infinite() {
            return Err(domain(
                op,
                format!("threshold z = {z} must be finite and >= 0"),
            ));
        }
        if !(r >= 0.0) {
            return Err(domain(op, format!("r = {r} must be >= 0")));
        }
        if z == 0.0 || r == 0.0 {
            return Ok(1.0);
        }
        let p = &self.params;
        let arg = LaplaceArg::for_link(z, r, alpha, p, self.window_radius);
        let noise = (-arg.s * p.sigma2).exp();
        if noise == 0.0 {
            return Ok(0.0);
        }
        let inner = self.quad.tightened(NESTED_TIGHTENING);
        Ok(noise * laplace_all_roads(&arg, &inner)? * laplace_origin_road(z, r, alpha, p.mu_v)?)
    }

    /// V2V success probability given the serving distance.
    pub fn success_v2v_given_r(&self, z: f64, r_v: f64) -> Result<f64, AnalyticError> {
        self.conditional_success(z, r_v, self.params.alpha_v, "success_v2v_given_r")
    }

    /// V2B success probability given the serving distance.
    pub fn success_v2b_given_r(&self, z: f64, r_b: f64) -> Result<f64, AnalyticError> {
        self.conditional_success(z, r_b, self.params.alpha_b, "success_v2b_given_r")
    }

    /// V2V success without a cellular fallback.
    pub fn success_v2v_only(&self, z: f64) -> Result<f64, AnalyticError> {
        let scale = self.v2v_quantile(0.5)?;
        self.success_v2v_only_scaled(z, scale)
    }

    fn success_v2v_only_scaled(&self, z: f64, scale: f64) -> Result<f64, AnalyticError> {
        self.integrate_rv("success_v2v_only", scale, |r| {
            Ok(self.success_v2v_given_r(z, r)? * self.v2v_pdf(r)?)
        })
    }

    /// Full breakdown at threshold `z` (linear).
    pub fn success_v2x(&self, z: f64) -> Result<SuccessBreakdown, AnalyticError> {
        let scale = self.v2v_quantile(0.5)?;
        let p_v2v_assoc = self.assoc_v2v()?;
        let p_v2b_assoc = self.assoc_v2b()?;
        let p_v2v_success = if p_v2v_assoc == 0.0 {
            0.0
        } else {
            self.integrate_rv("success_v2x (V2V term)", scale, |r| {
                let a = self.assoc_v2v_given_rv(r)?;
                if a == 0.0 {
                    return Ok(0.0);
                }
                Ok(self.success_v2v_given_r(z, r)? * a * self.v2v_pdf(r)?)
            })?
        };
        let p_v2b_success = if p_v2b_assoc == 0.0 {
            0.0
        } else {
            self.integrate_rb("success_v2x (V2B term)", |r| {
                let a = self.assoc_v2b_given_rb(r)?;
                if a == 0.0 {
                    return Ok(0.0);
                }
                Ok(self.success_v2b_given_r(z, r)? * a * v2b_pdf(r, self.params.lambda_b)?)
            })?
        };
        let p_v2v_only = self.success_v2v_only_scaled(z, scale)?;
        Ok(SuccessBreakdown {
            p_v2v_success,
            p_v2b_success,
            p_v2v_assoc,
            p_v2b_assoc,
            p_v2x: p_v2v_success + p_v2b_success,
            p_v2v_only,
        })
    }

    /// Fraction of the mean interference (typical road plus the planar density
    /// `πλ_R μ` of the other roads) that comes from beyond the window, seen from
    /// a receiver with exclusion radius `r_ref`.
    pub fn window_tail_fraction(&self, r_ref: f64, alpha: f64) -> f64 {
        interference_tail_fraction(&self.params, self.window_radius, r_ref, alpha)
    }
}

/// Mean-interference tail fraction; `1.0` when the mean diverges (`α ≤ 2`).
pub fn interference_tail_fraction(
    params: &NetworkParams,
    window_radius: f64,
    r_ref: f64,
    alpha: f64,
) -> f64 {
    if alpha <= 2.0 || r_ref <= 0.0 {
        return 1.0;
    }
    if window_radius <= r_ref {
        return 1.0;
    }
    let mean_beyond = |rho: f64| {
        2.0 * params.mu_v * rho.powf(1.0 - alpha) / (alpha - 1.0)
            + PI * params.lambda_r * params.mu_v * 2.0 * PI * rho.powf(2.0 - alpha) / (alpha - 2.0)
    };
    mean_beyond(window_radius) / mean_beyond(r_ref)
}

/// `∫_lower^∞ f` where `f` may fail; the first failure is returned as-is.
fn integrate_fallible<F>(
    op: &'static str,
    lower: f64,
    scale: f64,
    quad: &QuadratureSpec,
    f: F,
) -> Result<f64, AnalyticError>
where
    F: Fn(f64) -> Result<f64, AnalyticError>,
{
    let failure = std::cell::RefCell::new(None);
    let wrapped = |x: f64| match f(x) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let res = integrate_tail(wrapped, lower, scale, quad);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    res.map_err(quad_err(op))
}
