//! Local outlier factor.
//!
//! The score of a query is the ratio between the mean local reachability
//! density of its k nearest training neighbors and its own, so values
//! near 1 are inliers and larger values are increasingly anomalous.
//! Neighbor sets include distance ties, per the original definition.
//!
//! Duplicate-heavy data can drive reachability distances to zero and
//! densities to infinity; when the query's density and its neighbors'
//! densities are both infinite the score is defined as 1 (an inlier among
//! duplicates), and a finite query density against infinite neighbor
//! densities yields an infinite score.

use crate::error::{Error, Result};
use crate::matrix::{sq_dist, Matrix};
use crate::par;
use crate::shallow::Scorer;

#[derive(Clone, Debug)]
pub struct LofParams {
    /// Neighbor count k.
    pub k: usize,
}

impl Default for LofParams {
    fn default() -> Self {
        Self { k: 48 }
    }
}

/// Fitted LOF model with precomputed k-distances and local reachability
/// densities of the training points.
#[derive(Clone, Debug)]
pub struct LofModel {
    train: Matrix,
    k: usize,
    k_dist: Vec<f64>,
    lrd: Vec<f64>,
}

/// Distances from `x` to every training row, ascending, with row indices.
fn sorted_distances(train: &Matrix, x: &[f64], skip: Option<usize>) -> Vec<(f64, usize)> {
    let mut dists: Vec<(f64, usize)> = train
        .rows_iter()
        .enumerate()
        .filter(|(j, _)| Some(*j) != skip)
        .map(|(j, row)| (sq_dist(row, x).sqrt(), j))
        .collect();
    dists.sort_by(|a, b| a.partial_cmp(b).expect("distances are finite"));
    dists
}

/// Neighbors within the k-distance (ties included) and that k-distance.
fn neighborhood(dists: &[(f64, usize)], k: usize) -> (Vec<(f64, usize)>, f64) {
    let k_dist = dists[k - 1].0;
    let neighbors: Vec<(f64, usize)> =
        dists.iter().take_while(|(d, _)| *d <= k_dist).copied().collect();
    (neighbors, k_dist)
}

fn local_reachability_density(neighbors: &[(f64, usize)], k_dist_of: &[f64]) -> f64 {
    let reach_sum: f64 = neighbors.iter().map(|&(d, o)| d.max(k_dist_of[o])).sum();
    if reach_sum == 0.0 {
        f64::INFINITY
    } else {
        neighbors.len() as f64 / reach_sum
    }
}

/// Fits LOF on the training matrix; requires `n > k`.
pub fn lof_fit(train: &Matrix, params: &LofParams) -> Result<LofModel> {
    let n = train.nrows();
    let k = params.k;
    if k == 0 {
        return Err(Error::InvalidParam("k must be positive".into()));
    }
    if n <= k {
        return Err(Error::TooFewNeighbors { n, k });
    }
    let per_point: Vec<(Vec<(f64, usize)>, f64)> = par::map_range(n, |i| {
        let dists = sorted_distances(train, train.row(i), Some(i));
        neighborhood(&dists, k)
    });
    let k_dist: Vec<f64> = per_point.iter().map(|(_, kd)| *kd).collect();
    let lrd: Vec<f64> =
        per_point.iter().map(|(nbrs, _)| local_reachability_density(nbrs, &k_dist)).collect();
    Ok(LofModel { train: train.clone(), k, k_dist, lrd })
}

impl LofModel {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_train(&self) -> usize {
        self.train.nrows()
    }
}

impl Scorer for LofModel {
    fn dim(&self) -> usize {
        self.train.ncols()
    }

    fn score(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.train.ncols() {
            return Err(Error::DimMismatch { expected: self.train.ncols(), found: x.len() });
        }
        let dists = sorted_distances(&self.train, x, None);
        let (neighbors, _) = neighborhood(&dists, self.k);
        let lrd_x = local_reachability_density(&neighbors, &self.k_dist);
        let neighbor_lrd_mean: f64 =
            neighbors.iter().map(|&(_, o)| self.lrd[o]).sum::<f64>() / neighbors.len() as f64;
        Ok(match (lrd_x.is_infinite(), neighbor_lrd_mean.is_infinite()) {
            (true, true) => 1.0,
            (true, false) => 0.0,
            (false, true) => f64::INFINITY,
            (false, false) => neighbor_lrd_mean / lrd_x,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::RngStream;
    use rand::Rng;

    /// Literal transcription of the LOF definition, recomputed per query.
    fn naive_lof(train: &Matrix, k: usize, x: &[f64]) -> f64 {
        let n = train.nrows();
        let dist = |a: &[f64], b: &[f64]| sq_dist(a, b).sqrt();
        let train_neighbors = |i: usize| -> Vec<usize> {
            let mut ds: Vec<(f64, usize)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| (dist(train.row(i), train.row(j)), j))
                .collect();
            ds.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let kd = ds[k - 1].0;
            ds.into_iter().filter(|(d, _)| *d <= kd).map(|(_, j)| j).collect()
        };
        let kdist = |i: usize| -> f64 {
            let mut ds: Vec<f64> =
                (0..n).filter(|&j| j != i).map(|j| dist(train.row(i), train.row(j))).collect();
            ds.sort_by(|a, b| a.partial_cmp(b).unwrap());
            ds[k - 1]
        };
        let lrd_train = |i: usize| -> f64 {
            let nbrs = train_neighbors(i);
            let s: f64 =
                nbrs.iter().map(|&o| dist(train.row(i), train.row(o)).max(kdist(o))).sum();
            if s == 0.0 {
                f64::INFINITY
            } else {
                nbrs.len() as f64 / s
            }
        };
        let mut ds: Vec<(f64, usize)> =
            (0..n).map(|j| (dist(x, train.row(j)), j)).collect();
        ds.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let kd_x = ds[k - 1].0;
        let nbrs: Vec<(f64, usize)> =
            ds.into_iter().filter(|(d, _)| *d <= kd_x).collect();
        let s: f64 = nbrs.iter().map(|&(d, o)| d.max(kdist(o))).sum();
        let lrd_x = if s == 0.0 { f64::INFINITY } else { nbrs.len() as f64 / s };
        let mean_nbr: f64 =
            nbrs.iter().map(|&(_, o)| lrd_train(o)).sum::<f64>() / nbrs.len() as f64;
        match (lrd_x.is_infinite(), mean_nbr.is_infinite()) {
            (true, true) => 1.0,
            (true, false) => 0.0,
            (false, true) => f64::INFINITY,
            (false, false) => mean_nbr / lrd_x,
        }
    }

    fn stream() -> RngStream {
        RngStream::from_root(31).fork("lof.test", 0)
    }

    #[test]
    fn identical_points_score_one() {
        let train = Matrix::from_rows(&vec![vec![2.0, 2.0]; 10]).unwrap();
        let model = lof_fit(&train, &LofParams { k: 3 }).unwrap();
        assert_eq!(model.score(&[2.0, 2.0]).unwrap(), 1.0);
    }

    #[test]
    fn matches_naive_reference() {
        let mut rng = stream().fork("ref", 0).rng();
        let rows: Vec<Vec<f64>> =
            (0..20).map(|_| (0..2).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let train = Matrix::from_rows(&rows).unwrap();
        let model = lof_fit(&train, &LofParams { k: 3 }).unwrap();
        for q in 0..30 {
            let x: Vec<f64> = (0..2).map(|_| rng.random_range(-1.5..1.5)).collect();
            let fast = model.score(&x).unwrap();
            let slow = naive_lof(&train, 3, &x);
            assert!((fast - slow).abs() < 1e-9, "query {q}: {fast} vs {slow}");
        }
    }

    #[test]
    fn far_query_is_flagged() {
        let mut rng = stream().fork("far", 0).rng();
        let rows: Vec<Vec<f64>> =
            (0..100).map(|_| (0..2).map(|_| rng.random_range(0.0..1.0)).collect()).collect();
        let model = lof_fit(&Matrix::from_rows(&rows).unwrap(), &LofParams { k: 5 }).unwrap();
        let score = model.score(&[10.0, 10.0]).unwrap();
        assert!(score > 1.5, "far-away LOF = {score}");
    }

    #[test]
    fn interior_point_of_uniform_cluster_is_near_one() {
        let mut rows = Vec::new();
        for i in 0..15 {
            for j in 0..15 {
                rows.push(vec![i as f64, j as f64]);
            }
        }
        let model = lof_fit(&Matrix::from_rows(&rows).unwrap(), &LofParams { k: 8 }).unwrap();
        let score = model.score(&[7.2, 7.2]).unwrap();
        assert!((score - 1.0).abs() < 0.2, "interior LOF = {score}");
    }

    #[test]
    fn requires_more_samples_than_neighbors() {
        let train = Matrix::from_rows(&[[0.0], [1.0], [2.0]]).unwrap();
        let err = lof_fit(&train, &LofParams { k: 3 }).unwrap_err();
        assert!(matches!(err, Error::TooFewNeighbors { n: 3, k: 3 }));
    }
}
