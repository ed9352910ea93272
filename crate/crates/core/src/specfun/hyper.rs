//! Gauss hypergeometric function `2F1(a, b; c; z)` on the non-positive real
//! axis.
//!
//! The interference exponent of the road through the receiver only needs
//! `2F1(1, (α-1)/α; 2-1/α; -z)` with `z ≥ 0`, so the implementation covers
//! `z ≤ 0` and nothing else. Two independent routes are provided:
//!
//! * [`gauss_2f1`]: direct series near the origin, Pfaff transform on
//!   `[-1, -1/2)`, and the `1/(1-z)` connection formula below `-1`;
//! * [`gauss_2f1_pfaff`]: the Pfaff-transformed series everywhere (slow as
//!   `z → -∞`, used to cross-check the first route).

use statrs::function::gamma::gamma;

use super::{domain, SpecfunError};

const MAX_TERMS: usize = 200_000;

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x.fract() == 0.0
}

fn recip_gamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        0.0
    } else {
        1.0 / gamma(x)
    }
}

fn check(a: f64, b: f64, c: f64, z: f64) -> Result<(), SpecfunError> {
    if !(a.is_finite() && b.is_finite() && c.is_finite() && z.is_finite()) {
        return Err(domain("gauss_2f1", "non-finite parameter"));
    }
    if is_nonpositive_integer(c) {
        return Err(domain(
            "gauss_2f1",
            format!("c = {c} is a non-positive integer"),
        ));
    }
    if z > 0.0 {
        return Err(domain("gauss_2f1", format!("z = {z} > 0 is not supported")));
    }
    Ok(())
}

/// Σ (a)_k (b)_k / ((c)_k k!) w^k for |w| < 1.
fn series(a: f64, b: f64, c: f64, w: f64) -> Result<f64, SpecfunError> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * w;
        sum += term;
        if term == 0.0 || (term.abs() <= 0.25 * f64::EPSILON * sum.abs() && kf > (a * b).abs()) {
            return Ok(sum);
        }
    }
    Err(SpecfunError::SeriesNonConvergence {
        function: "gauss_2f1",
        terms: MAX_TERMS,
    })
}

/// 2F1(a,b;c;z) = (1-z)^-a 2F1(a, c-b; c; z/(z-1))
fn pfaff(a: f64, b: f64, c: f64, z: f64) -> Result<f64, SpecfunError> {
    let w = z / (z - 1.0);
    Ok((1.0 - z).powf(-a) * series(a, c - b, c, w)?)
}

/// Connection formula in `1/(1-z)`; needs `b - a` to be non-integer.
fn reflect_inverse(a: f64, b: f64, c: f64, z: f64) -> Result<f64, SpecfunError> {
    let w = 1.0 / (1.0 - z);
    let gc = gamma(c);
    let t1 = gc * gamma(b - a) * recip_gamma(b) * recip_gamma(c - a);
    let t2 = gc * gamma(a - b) * recip_gamma(a) * recip_gamma(c - b);
    let f1 = if t1 == 0.0 {
        0.0
    } else {
        series(a, c - b, a - b + 1.0, w)?
    };
    let f2 = if t2 == 0.0 {
        0.0
    } else {
        series(b, c - a, b - a + 1.0, w)?
    };
    Ok(t1 * w.powf(a) * f1 + t2 * w.powf(b) * f2)
}

/// `2F1(a, b; c; z)` for real `z ≤ 0`; `c` must not be a non-positive integer.
pub fn gauss_2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64, SpecfunError> {
    check(a, b, c, z)?;
    if z == 0.0 {
        return Ok(1.0);
    }
    if z >= -0.5 {
        return series(a, b, c, z);
    }
    if z >= -1.0 || (b - a).fract() == 0.0 {
        return pfaff(a, b, c, z);
    }
    reflect_inverse(a, b, c, z)
}

/// Same function as [`gauss_2f1`], always through the Pfaff transform.
pub fn gauss_2f1_pfaff(a: f64, b: f64, c: f64, z: f64) -> Result<f64, SpecfunError> {
    check(a, b, c, z)?;
    if z == 0.0 {
        return Ok(1.0);
    }
    pfaff(a, b, c, z)
}
