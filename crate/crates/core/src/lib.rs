//! Bounds on the reliability function `E(R, A)` of the discrete-time Gaussian
//! channel with per-dimension power `A`, plus a small spherical-code lab for
//! desk-scale empirical checks.
//!
//! Modules:
//! - [`functions`]: parametric rate, correlation and spectrum functions, the
//!   critical rate and the derived thresholds.
//! - [`bounds`]: upper and lower exponent bounds, the numeric sphere-packing
//!   optimizer and the min–max cap-projection bound.
//! - [`spectrum`]: spectrum lower-bound envelopes and the additive exponent.
//! - [`geometry`]: sphere, cap and ring areas, coordinate geometry and
//!   cardinality bounds for spherical codes.
//! - [`codes`]: code generators, exact spectra and Monte Carlo ML decoding.
//! - [`validate`]: the identity suite behind `gauss-reliability validate`.
//! - [`cli`]: the command-line front end.

// `!(x > 0.0)` is the NaN-rejecting form used throughout
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod codes;
pub mod error;
pub mod functions;
pub mod geometry;
pub mod numeric;
pub mod spectrum;
pub mod validate;

pub use error::{Error, Result};
pub use functions::{ChannelParams, ThresholdSet};
