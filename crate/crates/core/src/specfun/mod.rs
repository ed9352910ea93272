//! Special functions and quadrature for the closed-form and integral
//! expressions of the reliability model.
//!
//! Everything here is a pure function of its arguments: no caches, no global
//! state, so it can be called from any number of worker threads.

mod bessel;
mod hyper;
mod quad;
mod struve;

pub use bessel::{bessel_i, bessel_i_scaled};
pub use hyper::{gauss_2f1, gauss_2f1_pfaff};
pub use quad::{integrate, integrate_tail, QuadratureSpec};
pub use struve::{struve_l, struve_m};

use thiserror::Error;

/// Above this argument the Bessel and Struve routines switch from power
/// series to asymptotic (exp-scaled) expansions.
pub(crate) const SERIES_SWITCHOVER: f64 = 20.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecfunError {
    #[error("{function}: argument out of domain ({detail})")]
    Domain {
        function: &'static str,
        detail: String,
    },
    #[error("{function}({x}) overflows f64")]
    Overflow { function: &'static str, x: f64 },
    #[error("{function}: series failed to converge after {terms} terms")]
    SeriesNonConvergence {
        function: &'static str,
        terms: usize,
    },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("quadrature did not converge in {subdivisions} subdivisions: estimate {estimate:e} with error {error:e}")]
    NonConvergence {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },
    #[error("integrand returned non-finite value {value} at x = {x}")]
    NonFinite { x: f64, value: f64 },
    #[error("invalid integration bounds [{lower}, {upper}]")]
    InvalidBounds { lower: f64, upper: f64 },
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(&'static str),
}

pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> SpecfunError {
    SpecfunError::Domain {
        function,
        detail: detail.into(),
    }
}
