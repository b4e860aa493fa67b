//! Adaptive nonparametric classification under unknown class-conditional
//! label noise.
//!
//! The crate is `no_std` (with `alloc`) and contains every numerical piece of
//! the pipeline:
//!
//! * [`metric`], [`dataset`], [`neighbors`]: points, metrics and exact
//!   neighbour orderings with prefix means.
//! * [`lepski`]: Hoeffding bands and Lepski's rule for a pointwise adaptive `k`.
//! * [`supremum`]: the lower-confidence-bound supremum estimator and the
//!   noise-rate estimates built from it.
//! * [`classifier`]: the plug-in classifier with a shifted threshold.
//! * [`distributions`]: synthetic families with exact regression functions,
//!   counter-based samplers, excess-risk oracles and the lower-bound
//!   constructions.
//! * [`harness`]: trial execution, per-`n` aggregation and log-log rate fits.
//!
//! File formats, the threaded sweep runner and the command-line interface live
//! in the `noiseknn` companion crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod classifier;
pub mod dataset;
pub mod distributions;
mod error;
pub mod harness;
pub mod lepski;
pub mod metric;
mod num;
pub mod neighbors;
pub mod rng;
pub mod supremum;

pub use classifier::{corrected_regression, CorrectedRegression, PluginClassifier};
pub use dataset::Dataset;
pub use error::{Error, Result};
pub use lepski::{ci_halfwidth, lepski_estimate_at, lepski_select, LepskiConfig, LepskiEstimate};
pub use metric::{BitString, Metric, Point};
pub use neighbors::{knn_estimate, neighbor_order, NeighborIndex, NeighborOrder};
pub use supremum::{estimate_noise_rates, inf_estimate, sup_estimate, NoiseRates, SupEstimate};
