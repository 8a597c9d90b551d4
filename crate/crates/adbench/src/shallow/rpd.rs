//! Random projection depth.
//!
//! The outlyingness of `x` against training set `X` is the worst robust
//! z-score over `p` random unit projections:
//! `O(x) = max_u |u^T x - MED(u^T X)| / MAD(u^T X)`, and the depth is
//! `RPD(x) = 1 / (1 + O(x))`. The anomaly score is `O` itself: it is a
//! strictly decreasing function of the depth, so it ranks identically
//! while avoiding floating-point compression near depth 1.

use rand_distr::{Distribution, StandardNormal};

use crate::data::RngStream;
use crate::error::{Error, Result};
use crate::matrix::{dot, Matrix};
use crate::par;
use crate::shallow::Scorer;

/// Projections with a MAD below this threshold are skipped.
const MAD_GUARD: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct RpdParams {
    /// Number of random projections approximating the depth.
    pub n_projections: usize,
}

impl Default for RpdParams {
    fn default() -> Self {
        Self { n_projections: 1000 }
    }
}

/// Fitted random-projection-depth model.
///
/// Keeps only the informative projections (MAD above the guard) together
/// with their training medians and MADs; the training matrix itself is
/// not retained.
#[derive(Clone, Debug)]
pub struct RpdModel {
    projections: Matrix,
    medians: Vec<f64>,
    mads: Vec<f64>,
}

fn median_of_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).expect("projection values are finite"));
    median_of_sorted(values)
}

/// Draws a unit vector uniformly on the hypersphere.
fn random_unit_vector(dim: usize, stream: &RngStream) -> Vec<f64> {
    let mut rng = stream.rng();
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = dot(&v, &v).sqrt();
        if norm > 1e-9 {
            return v.iter().map(|x| x / norm).collect();
        }
    }
}

/// Fits the depth statistics from explicit projection directions.
pub fn rpd_fit_with_projections(train: &Matrix, projections: Matrix) -> Result<RpdModel> {
    if train.is_empty() {
        return Err(Error::EmptyTrain { context: "RPD fit" });
    }
    if projections.ncols() != train.ncols() {
        return Err(Error::DimMismatch { expected: train.ncols(), found: projections.ncols() });
    }
    let p = projections.nrows();
    if p == 0 {
        return Err(Error::InvalidParam("need at least one projection".into()));
    }
    let stats: Vec<Option<(f64, f64)>> = par::map_range(p, |j| {
        let u = projections.row(j);
        let mut values: Vec<f64> = train.rows_iter().map(|x| dot(u, x)).collect();
        let med = median(&mut values);
        let mut deviations: Vec<f64> = values.iter().map(|v| (v - med).abs()).collect();
        let mad = median(&mut deviations);
        (mad >= MAD_GUARD).then_some((med, mad))
    });

    let mut kept_rows = Vec::new();
    let mut medians = Vec::new();
    let mut mads = Vec::new();
    for (j, stat) in stats.iter().enumerate() {
        if let Some((med, mad)) = stat {
            kept_rows.push(j);
            medians.push(*med);
            mads.push(*mad);
        }
    }
    if kept_rows.is_empty() {
        return Err(Error::DegenerateProjections { count: p });
    }
    Ok(RpdModel { projections: projections.select_rows(&kept_rows), medians, mads })
}

/// Draws `n_projections` uniform unit directions and fits the model.
pub fn rpd_fit(train: &Matrix, params: &RpdParams, stream: &RngStream) -> Result<RpdModel> {
    if params.n_projections == 0 {
        return Err(Error::InvalidParam("n_projections must be positive".into()));
    }
    let dim = train.ncols();
    let rows = par::map_range(params.n_projections, |j| {
        random_unit_vector(dim, &stream.fork("rpd.proj", j as u64))
    });
    rpd_fit_with_projections(train, Matrix::from_rows(&rows)?)
}

impl RpdModel {
    /// Worst-case robust z-score over the kept projections.
    pub fn outlyingness(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.projections.ncols() {
            return Err(Error::DimMismatch { expected: self.projections.ncols(), found: x.len() });
        }
        let mut worst = 0.0f64;
        for (j, u) in self.projections.rows_iter().enumerate() {
            let o = (dot(u, x) - self.medians[j]).abs() / self.mads[j];
            worst = worst.max(o);
        }
        Ok(worst)
    }

    /// Statistical depth in (0, 1]: `1 / (1 + outlyingness)`.
    pub fn depth(&self, x: &[f64]) -> Result<f64> {
        Ok(1.0 / (1.0 + self.outlyingness(x)?))
    }

    /// Number of projections that survived the MAD guard.
    pub fn n_projections(&self) -> usize {
        self.projections.nrows()
    }

    #[cfg(test)]
    fn projection_rows(&self) -> &Matrix {
        &self.projections
    }
}

impl Scorer for RpdModel {
    fn dim(&self) -> usize {
        self.projections.ncols()
    }

    fn score(&self, x: &[f64]) -> Result<f64> {
        self.outlyingness(x)
    }
}
