//! Modified Bessel functions of the first kind, orders 0 and 1.

use super::{domain, SpecfunError, SERIES_SWITCHOVER};

const MAX_TERMS: usize = 500;

fn check_args(order: i32, x: f64) -> Result<(), SpecfunError> {
    if order != 0 && order != 1 {
        return Err(domain("bessel_i", format!("order {order} not in {{0, 1}}")));
    }
    if !(x >= 0.0) || x.is_infinite() {
        return Err(domain(
            "bessel_i",
            format!("x = {x} must be finite and >= 0"),
        ));
    }
    Ok(())
}

/// Σ (x/2)^(2k+n) / (k! (k+n)!)
fn series(order: i32, x: f64) -> Result<f64, SpecfunError> {
    let half = 0.5 * x;
    let q = half * half;
    let n = order as f64;
    let mut term = if order == 0 { 1.0 } else { half };
    let mut sum = term;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        term *= q / (kf * (kf + n));
        sum += term;
        if term <= f64::EPSILON * 0.25 * sum {
            return Ok(sum);
        }
    }
    Err(SpecfunError::SeriesNonConvergence {
        function: "bessel_i",
        terms: MAX_TERMS,
    })
}

/// Hankel expansion of `e^-x I_n(x) sqrt(2πx)`, truncated at its smallest term.
fn asymptotic_scaled_sum(order: i32, x: f64) -> f64 {
    let mu = 4.0 * (order * order) as f64;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..MAX_TERMS {
        let odd = (2 * k - 1) as f64;
        term *= -(mu - odd * odd) / (k as f64 * 8.0 * x);
        if term.abs() >= prev || term == 0.0 {
            break;
        }
        sum += term;
        prev = term.abs();
        if prev <= f64::EPSILON * 0.25 * sum.abs() {
            break;
        }
    }
    sum
}

/// `e^-x I_n(x)` for `n ∈ {0, 1}`; finite for every finite `x ≥ 0`.
pub fn bessel_i_scaled(order: i32, x: f64) -> Result<f64, SpecfunError> {
    check_args(order, x)?;
    if x <= SERIES_SWITCHOVER {
        Ok(series(order, x)? * (-x).exp())
    } else {
        Ok(asymptotic_scaled_sum(order, x) / (2.0 * std::f64::consts::PI * x).sqrt())
    }
}

/// Modified Bessel function `I_n(x)` for `n ∈ {0, 1}` and `x ≥ 0`.
///
/// Power series up to `x = 20`, exp-scaled Hankel expansion beyond. Arguments
/// whose result exceeds `f64::MAX` return [`SpecfunError::Overflow`].
pub fn bessel_i(order: i32, x: f64) -> Result<f64, SpecfunError> {
    check_args(order, x)?;
    if x <= SERIES_SWITCHOVER {
        return series(order, x);
    }
    let sum = asymptotic_scaled_sum(order, x);
    let log_mag = x - 0.5 * (2.0 * std::f64::consts::PI * x).ln() + sum.ln();
    if log_mag >= f64::MAX.ln() {
        return Err(SpecfunError::Overflow {
            function: "bessel_i",
            x,
        });
    }
    Ok(log_mag.exp())
}
