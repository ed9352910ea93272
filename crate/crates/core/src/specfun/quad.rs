#![allow(clippy::excessive_precision)]

//! Globally adaptive Gauss-Kronrod (G10/K21) quadrature.
//!
//! Semi-infinite ranges `[a, inf)` are mapped onto `[0, 1)` with
//! `x = a + u / (1 - u)`, `dx = du / (1 - u)^2`. The Kronrod nodes never touch
//! the endpoints, so integrands that decay like `x^-p` (p > 1) or faster are
//! handled without an explicit cutoff.

use super::QuadratureError;

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn new(
        abs_tol: f64,
        rel_tol: f64,
        max_subdivisions: usize,
    ) -> Result<Self, QuadratureError> {
        let spec = Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), QuadratureError> {
        if !(self.abs_tol > 0.0) {
            return Err(QuadratureError::InvalidSpec("abs_tol must be > 0"));
        }
        if !(self.rel_tol > 0.0) {
            return Err(QuadratureError::InvalidSpec("rel_tol must be > 0"));
        }
        if self.max_subdivisions == 0 {
            return Err(QuadratureError::InvalidSpec(
                "max_subdivisions must be >= 1",
            ));
        }
        Ok(())
    }

    /// Tolerances divided by `factor`, for integrals nested inside another
    /// integrand (the outer rule must not see the inner rule's noise).
    pub fn tightened(&self, factor: f64) -> Self {
        Self {
            abs_tol: (self.abs_tol / factor).max(f64::MIN_POSITIVE),
            rel_tol: (self.rel_tol / factor).max(4.0 * f64::EPSILON),
            max_subdivisions: self.max_subdivisions,
        }
    }
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_931_828_195,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// 10-point Gauss weights for XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn eval<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64, QuadratureError> {
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(QuadratureError::NonFinite { x, value: v })
    }
}

fn kronrod21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Segment, QuadratureError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = eval(f, center)?;
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = eval(f, center - dx)?;
        let f2 = eval(f, center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Segment { a, b, value, error })
}

fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<f64, QuadratureError> {
    let first = kronrod21(f, a, b)?;
    let mut segments = vec![first];
    let mut total = first.value;
    let mut total_err = first.error;
    loop {
        let tol = spec.abs_tol.max(spec.rel_tol * total.abs());
        if total_err <= tol {
            return Ok(total);
        }
        if segments.len() >= spec.max_subdivisions {
            return Err(QuadratureError::NonConvergence {
                estimate: total,
                error: total_err,
                subdivisions: segments.len(),
            });
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, s)| {
                if s.error > acc.1 {
                    (i, s.error)
                } else {
                    acc
                }
            });
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            // Interval at floating-point resolution; nothing left to refine.
            return Err(QuadratureError::NonConvergence {
                estimate: total,
                error: total_err,
                subdivisions: segments.len() + 1,
            });
        }
        let left = kronrod21(f, seg.a, mid)?;
        let right = kronrod21(f, mid, seg.b)?;
        total += left.value + right.value - seg.value;
        total_err += left.error + right.error - seg.error;
        segments.push(left);
        segments.push(right);
        // Re-sum occasionally so cancellation in the running totals cannot drift.
        if segments.len() % 64 == 0 {
            total = segments.iter().map(|s| s.value).sum();
            total_err = segments.iter().map(|s| s.error).sum();
        }
    }
}

/// Integrates `f` over `[lower, upper]`; `upper` may be `f64::INFINITY`.
///
/// Non-finite integrand values abort with [`QuadratureError::NonFinite`];
/// running out of subdivisions returns the partial estimate inside
/// [`QuadratureError::NonConvergence`].
pub fn integrate<F>(
    f: F,
    lower: f64,
    upper: f64,
    spec: &QuadratureSpec,
) -> Result<f64, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    spec.validate()?;
    if lower.is_nan() || upper.is_nan() || !lower.is_finite() || upper == f64::NEG_INFINITY {
        return Err(QuadratureError::InvalidBounds { lower, upper });
    }
    if upper == f64::INFINITY {
        let mapped = |u: f64| {
            let w = 1.0 - u;
            f(lower + u / w) / (w * w)
        };
        return adaptive(&mapped, 0.0, 1.0, spec);
    }
    if upper < lower {
        return integrate(f, upper, lower, spec).map(|v| -v);
    }
    if upper == lower {
        return Ok(0.0);
    }
    adaptive(&f, lower, upper, spec)
}

/// `∫_lower^∞ f`, split at `lower + scale` so that the mass near the
/// characteristic length `scale` is resolved on a finite panel before the
/// remaining tail is mapped onto `[0, 1)`.
pub fn integrate_tail<F>(
    f: F,
    lower: f64,
    scale: f64,
    spec: &QuadratureSpec,
) -> Result<f64, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(QuadratureError::InvalidBounds {
            lower,
            upper: f64::INFINITY,
        });
    }
    let half = QuadratureSpec {
        abs_tol: 0.5 * spec.abs_tol,
        ..*spec
    };
    let head = integrate(&f, lower, lower + scale, &half)?;
    let tail = integrate(
        |x: f64| scale * f(lower + scale * x),
        1.0,
        f64::INFINITY,
        &half,
    )?;
    Ok(head + tail)
}
