//! Estimators, concentration bounds, and minimax constructions for
//! high-dimensional statistics, together with a seeded Monte Carlo harness
//! that checks each rate or high-probability bound at desk scale.
//!
//! The library side is pure: every sampler and estimator is a deterministic
//! function of its inputs and a [`datagen::RandomSource`] token, so Monte
//! Carlo sweeps parallelize across seeds without losing reproducibility.
//! All IO lives in [`harness`].

pub mod concentration;
pub mod datagen;
pub mod graphical;
pub mod harness;
pub mod linalg;
pub mod matrix_estimation;
pub mod minimax;
pub mod nonparametric;
pub mod regression;

mod error;
mod util;

pub use error::{Error, Result};
