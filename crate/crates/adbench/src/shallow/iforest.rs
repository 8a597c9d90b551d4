//! Isolation forest.
//!
//! Trees recursively split random features at random thresholds on
//! independent subsamples; anomalies isolate in fewer splits. A sample's
//! score is `s = 2^(-E(h) / c(n))` where `E(h)` is its mean adjusted path
//! length over trees, `n` the training count, and `c(m)` the average path
//! length of an unsuccessful binary-search-tree lookup among `m` points,
//! computed with exact harmonic numbers. Unsplit leaves of size `m` add
//! `c(m)` to the path.

use rand::seq::index::sample;
use rand::Rng;

use crate::data::RngStream;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::par;
use crate::shallow::Scorer;

#[derive(Clone, Debug)]
pub struct IsolationForestParams {
    pub n_trees: usize,
    /// Samples drawn (without replacement) per tree, capped at n.
    pub subsample: usize,
}

impl Default for IsolationForestParams {
    fn default() -> Self {
        Self { n_trees: 100, subsample: 1024 }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Split { feature: usize, threshold: f64, left: u32, right: u32 },
    Leaf { size: u32 },
}

#[derive(Clone, Debug, PartialEq)]
struct Tree {
    nodes: Vec<Node>,
    root: u32,
}

fn harmonic(m: usize) -> f64 {
    (1..=m).map(|i| 1.0 / i as f64).sum()
}

/// Average path length `c(m)` of an isolation tree over `m` points.
pub fn average_path_length(m: usize) -> f64 {
    if m <= 1 {
        0.0
    } else {
        2.0 * harmonic(m - 1) - 2.0 * (m as f64 - 1.0) / m as f64
    }
}

/// Anomaly score from a mean path length and the normalizer `c(n)`.
pub fn anomaly_score_from_path(mean_path: f64, c_n: f64) -> f64 {
    (-mean_path / c_n).exp2()
}

fn grow(
    nodes: &mut Vec<Node>,
    data: &Matrix,
    idx: &[usize],
    depth: usize,
    limit: usize,
    rng: &mut impl Rng,
) -> u32 {
    let make_leaf = |nodes: &mut Vec<Node>| {
        nodes.push(Node::Leaf { size: idx.len() as u32 });
        (nodes.len() - 1) as u32
    };
    if depth >= limit || idx.len() <= 1 {
        return make_leaf(nodes);
    }
    // Candidate features are those not constant over this node's samples.
    let d = data.ncols();
    let mut candidates = Vec::new();
    let mut ranges = vec![(f64::INFINITY, f64::NEG_INFINITY); d];
    for &i in idx {
        let row = data.row(i);
        for f in 0..d {
            ranges[f].0 = ranges[f].0.min(row[f]);
            ranges[f].1 = ranges[f].1.max(row[f]);
        }
    }
    for (f, &(lo, hi)) in ranges.iter().enumerate() {
        if hi > lo {
            candidates.push(f);
        }
    }
    if candidates.is_empty() {
        return make_leaf(nodes);
    }
    let feature = candidates[rng.random_range(0..candidates.len())];
    let (lo, hi) = ranges[feature];
    let threshold = rng.random_range(lo..hi);
    let (left_idx, right_idx): (Vec<usize>, Vec<usize>) =
        idx.iter().partition(|&&i| data.row(i)[feature] < threshold);
    let left = grow(nodes, data, &left_idx, depth + 1, limit, rng);
    let right = grow(nodes, data, &right_idx, depth + 1, limit, rng);
    nodes.push(Node::Split { feature, threshold, left, right });
    (nodes.len() - 1) as u32
}

impl Tree {
    fn path_length(&self, x: &[f64], c_table: &[f64]) -> f64 {
        let mut node = self.root;
        let mut depth = 0.0;
        loop {
            match &self.nodes[node as usize] {
                Node::Leaf { size } => return depth + c_table[*size as usize],
                Node::Split { feature, threshold, left, right } => {
                    node = if x[*feature] < *threshold { *left } else { *right };
                    depth += 1.0;
                }
            }
        }
    }

    #[cfg(test)]
    fn max_depth(&self) -> usize {
        fn walk(nodes: &[Node], at: u32) -> usize {
            match &nodes[at as usize] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => {
                    1 + walk(nodes, *left).max(walk(nodes, *right))
                }
            }
        }
        walk(&self.nodes, self.root)
    }
}

/// Fitted isolation forest.
#[derive(Clone, Debug, PartialEq)]
pub struct IsolationForestModel {
    trees: Vec<Tree>,
    /// `c(m)` lookup for leaf sizes up to the subsample size.
    c_table: Vec<f64>,
    c_n: f64,
    dim: usize,
    n_train: usize,
}

/// Grows `n_trees` trees, each on an independent random subsample.
pub fn iforest_fit(
    train: &Matrix,
    params: &IsolationForestParams,
    stream: &RngStream,
) -> Result<IsolationForestModel> {
    let n = train.nrows();
    if n < 2 {
        return Err(Error::TooFewSamples { context: "isolation forest", min: 2, found: n });
    }
    if params.n_trees == 0 {
        return Err(Error::InvalidParam("n_trees must be positive".into()));
    }
    let subsample = params.subsample.clamp(2, n);
    let height_limit = (subsample as f64).log2().ceil() as usize;
    let trees = par::map_range(params.n_trees, |t| {
        let mut rng = stream.fork("iforest.tree", t as u64).rng();
        let idx: Vec<usize> = sample(&mut rng, n, subsample).into_iter().collect();
        let mut nodes = Vec::new();
        let root = grow(&mut nodes, train, &idx, 0, height_limit, &mut rng);
        Tree { nodes, root }
    });
    let c_table: Vec<f64> = (0..=subsample).map(average_path_length).collect();
    Ok(IsolationForestModel {
        trees,
        c_table,
        c_n: average_path_length(n),
        dim: train.ncols(),
        n_train: n,
    })
}

impl IsolationForestModel {
    /// Mean adjusted path length over all trees.
    pub fn mean_path_length(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimMismatch { expected: self.dim, found: x.len() });
        }
        let total: f64 = self.trees.iter().map(|t| t.path_length(x, &self.c_table)).sum();
        Ok(total / self.trees.len() as f64)
    }

    /// Normalizer `c(n)` for the training count this model was fitted on.
    pub fn c_n(&self) -> f64 {
        self.c_n
    }

    pub fn n_train(&self) -> usize {
        self.n_train
    }
}

impl Scorer for IsolationForestModel {
    fn dim(&self) -> usize {
        self.dim
    }

    fn score(&self, x: &[f64]) -> Result<f64> {
        Ok(anomaly_score_from_path(self.mean_path_length(x)?, self.c_n))
    }
}
