//! Anomaly-detection benchmark toolkit for 1-D range-profile signals.
//!
//! The crate bundles four shallow detectors (one-class SVM, isolation
//! forest, local outlier factor, random projection depth), three deep
//! detectors built on a small 1-D convolutional network engine
//! (reconstruction autoencoder, hypersphere embedding with optional
//! autoencoder pretraining, and its semi-supervised variant), a synthetic
//! range-profile generator, and a deterministic experiment harness that
//! sweeps training-set pollution and labeled-anomaly ratios and reports
//! ROC AUC per experiment cell.
//!
//! Every detector exposes the same contract: fit on a training matrix,
//! then score single samples where a higher score means more anomalous.
//! All stochastic steps draw from forkable [`data::RngStream`]s, so runs
//! are reproducible bit-for-bit regardless of thread count.

pub mod data;
pub mod deep;
pub mod error;
pub mod harness;
pub mod matrix;
pub mod metrics;
pub mod nn;
pub mod par;
pub mod preprocess;
pub mod shallow;
pub mod synth;

pub use error::{Error, Result};
pub use matrix::Matrix;
