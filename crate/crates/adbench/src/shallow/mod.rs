//! Shallow anomaly detectors behind one fit/score interface.
//!
//! Every detector fits on a training matrix and then scores single
//! samples, higher meaning more anomalous. Fitted models are immutable
//! and safe for concurrent scoring.

pub mod iforest;
pub mod lof;
pub mod ocsvm;
pub mod rpd;

pub use iforest::{iforest_fit, IsolationForestModel, IsolationForestParams};
pub use lof::{lof_fit, LofModel, LofParams};
pub use ocsvm::{ocsvm_fit, OcSvmModel, OcSvmParams};
pub use rpd::{rpd_fit, rpd_fit_with_projections, RpdModel, RpdParams};

use crate::error::Result;
use crate::matrix::Matrix;
use crate::par;

/// Uniform scoring interface: higher score = more anomalous.
pub trait Scorer: Send + Sync {
    /// Input dimension the model was fitted on.
    fn dim(&self) -> usize;

    /// Anomaly score of one sample.
    fn score(&self, x: &[f64]) -> Result<f64>;

    /// Scores every row; rows are independent so this parallelizes freely.
    fn score_batch(&self, samples: &Matrix) -> Result<Vec<f64>> {
        let rows: Vec<&[f64]> = samples.rows_iter().collect();
        par::map_slice(&rows, |row| self.score(row)).into_iter().collect()
    }
}
