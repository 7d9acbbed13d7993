//! Detection engine for a quantum-illumination radar and a target-side
//! quantum radar warning receiver.
//!
//! The modules build on each other bottom-up:
//!
//! * [`background`]: blackbody occupancy, background counts and variance.
//! * [`linkbudget`]: atmospheric, geometric and detector efficiencies.
//! * [`detection`]: SNR models, error probability, trial counts and `R_M`.
//! * [`sweep`]: parameter grids, `R_M = 1` contours, range/weather scenario lines.
//! * [`mc`]: Monte Carlo photon-counting experiments used as an empirical oracle.
//! * [`selfcheck`]: reference-value checks run by the CLI.

// `!(x > y)` is used on purpose so NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod background;
pub mod detection;
pub mod error;
pub mod linkbudget;
pub mod mc;
pub mod selfcheck;
pub mod sweep;

pub use error::{Error, Result};
