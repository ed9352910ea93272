//! Experiment runner: figure presets and TOML experiment files in, analytic
//! and simulated success probabilities out as CSV tables and SVG plots.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod output;
pub mod plot;
pub mod sample;
pub mod sweep;
pub mod units;

pub use config::{load_spec, ExperimentSpec, Preset, SpecError};
pub use sweep::{run, SweepResult};
