//! Explosion time of the anticipating stochastic Paris law.
//!
//! The solution of `dL = (c1 L^p + p c2² L^(2p-1) / 2) dt + c2 L^p dW` with
//! initial value `L_0 = g(W_T)` explodes at the first time `W` meets a falling
//! line whose intercept depends on `W_T`. This crate evaluates the
//! distribution of that time through closed-form Brownian-bridge crossing
//! probabilities and Gaussian quadrature, and checks every formula against
//! path simulation.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod barrier;
pub mod cdf;
pub mod cli;
pub mod error;
pub mod model;
pub mod monte_carlo;
pub mod normal;
pub mod quadrature;

pub use barrier::{
    bm_crossing_finite, bm_crossing_infinite, bridge_crossing, bridge_crossing_after_pin,
    bridge_crossing_at_pin, bridge_crossing_before_pin, BridgePin, Horizon, LinearBarrier,
    Orientation,
};
pub use cdf::{blowup_cdf, blowup_cdf_curve, CdfPoint, QuadratureConfig, Regime};
pub use error::{Error, Result};
pub use model::{InitialCondition, KnotTable, ModelParams};
pub use normal::{
    exp_times_phi, gaussian_exp_integral, log_std_normal_cdf, std_normal_cdf, std_normal_pdf,
    Probability,
};
