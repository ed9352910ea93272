//! Stochastic-geometry model of vehicular networks in which each vehicle
//! either talks to its nearest neighbour (V2V) or to the nearest base station
//! (V2B): analytic success probabilities and a Monte Carlo engine to check them.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod par;
pub mod pointprocess;
pub mod simulator;
pub mod specfun;
