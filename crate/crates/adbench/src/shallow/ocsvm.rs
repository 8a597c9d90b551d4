//! One-class SVM with a Gaussian kernel.
//!
//! Solves the standard dual of the one-class objective,
//! `min 1/2 a^T Q a` with `0 <= a_i <= 1/(nu n)` and `sum a_i = 1`,
//! by pairwise coordinate ascent (SMO): repeatedly pick the maximally
//! KKT-violating pair and solve the two-variable subproblem analytically.
//! The anomaly score of `x` is `rho - sum_i a_i k(x_i, x)`, positive
//! outside the learned boundary.

use std::collections::{HashMap, VecDeque};
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::matrix::{sq_dist, Matrix};
use crate::shallow::Scorer;

/// Numerical floor for the two-variable curvature.
const TAU: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct OcSvmParams {
    /// Upper bound on the training outlier fraction, lower bound on the
    /// support-vector fraction.
    pub nu: f64,
    /// RBF kernel width; `None` selects `1 / (d * var(train))`.
    pub gamma: Option<f64>,
    /// KKT tolerance for convergence.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for OcSvmParams {
    fn default() -> Self {
        Self { nu: 0.1, gamma: None, tol: 1e-4, max_iter: 100_000 }
    }
}

/// Fitted one-class SVM: support vectors, their dual coefficients, and the
/// offset `rho`.
#[derive(Clone, Debug)]
pub struct OcSvmModel {
    support_vectors: Matrix,
    dual_coefs: Vec<f64>,
    rho: f64,
    gamma: f64,
    nu: f64,
    objective: f64,
    n_train: usize,
}

fn rbf(gamma: f64, a: &[f64], b: &[f64]) -> f64 {
    (-gamma * sq_dist(a, b)).exp()
}

/// Row-wise kernel cache with FIFO eviction.
struct KernelCache<'a> {
    train: &'a Matrix,
    gamma: f64,
    cap: usize,
    rows: HashMap<usize, Rc<Vec<f64>>>,
    order: VecDeque<usize>,
}

impl<'a> KernelCache<'a> {
    fn new(train: &'a Matrix, gamma: f64) -> Self {
        let n = train.nrows();
        // Budget ~64 MB of cached kernel entries.
        let cap = (8_000_000 / n.max(1)).clamp(8, n.max(8));
        Self { train, gamma, cap, rows: HashMap::new(), order: VecDeque::new() }
    }

    fn row(&mut self, i: usize) -> Rc<Vec<f64>> {
        if let Some(row) = self.rows.get(&i) {
            return Rc::clone(row);
        }
        let xi = self.train.row(i);
        let row: Rc<Vec<f64>> =
            Rc::new(self.train.rows_iter().map(|xj| rbf(self.gamma, xi, xj)).collect());
        if self.rows.len() >= self.cap {
            if let Some(old) = self.order.pop_front() {
                self.rows.remove(&old);
            }
        }
        self.rows.insert(i, Rc::clone(&row));
        self.order.push_back(i);
        row
    }
}

/// Data-driven default kernel width: `1 / (d * var(train))`.
pub fn default_gamma(train: &Matrix) -> f64 {
    let var = train.total_variance();
    let d = train.ncols().max(1) as f64;
    if var > 1e-300 {
        1.0 / (d * var)
    } else {
        1.0 / d
    }
}

/// Trains the one-class SVM by SMO on the dual problem.
pub fn ocsvm_fit(train: &Matrix, params: &OcSvmParams) -> Result<OcSvmModel> {
    let n = train.nrows();
    if n < 2 {
        return Err(Error::TooFewSamples { context: "one-class SVM", min: 2, found: n });
    }
    if !(params.nu > 0.0 && params.nu <= 1.0) {
        return Err(Error::BadNu { nu: params.nu });
    }
    let gamma = match params.gamma {
        Some(g) if g > 0.0 => g,
        Some(g) => return Err(Error::InvalidParam(format!("gamma must be positive, got {g}"))),
        None => default_gamma(train),
    };
    let c = 1.0 / (params.nu * n as f64);
    let mut cache = KernelCache::new(train, gamma);

    // Feasible start: fill alphas to the bound until the simplex budget of 1
    // is spent (the standard one-class initialization).
    let mut alpha = vec![0.0; n];
    let mut remaining = 1.0f64;
    for a in alpha.iter_mut() {
        let take = remaining.min(c);
        *a = take;
        remaining -= take;
        if remaining <= 0.0 {
            break;
        }
    }

    // Gradient of 1/2 a^T Q a is Q a.
    let mut gradient = vec![0.0; n];
    for (i, &a) in alpha.iter().enumerate() {
        if a > 0.0 {
            let row = cache.row(i);
            for (g, k) in gradient.iter_mut().zip(row.iter()) {
                *g += a * k;
            }
        }
    }

    let bound_eps = 1e-12 * c;
    let mut converged = false;
    let mut violation = f64::INFINITY;
    let mut iterations = 0;
    for iter in 0..params.max_iter {
        iterations = iter;
        // Most violating pair: i can grow (alpha < C), j can shrink (alpha > 0).
        let mut i_up = None;
        let mut i_down = None;
        for (t, (&a, &g)) in alpha.iter().zip(&gradient).enumerate() {
            if a < c - bound_eps && i_up.is_none_or(|(_, gu)| g < gu) {
                i_up = Some((t, g));
            }
            if a > bound_eps && i_down.is_none_or(|(_, gd)| g > gd) {
                i_down = Some((t, g));
            }
        }
        let (i_up, i_down) = (i_up.map(|(t, _)| t), i_down.map(|(t, _)| t));
        // No movable pair left means the constraints pin every variable:
        // the KKT conditions hold trivially.
        let (Some(i), Some(j)) = (i_up, i_down) else {
            converged = true;
            break;
        };
        violation = gradient[j] - gradient[i];
        if violation <= params.tol {
            converged = true;
            break;
        }
        let row_i = cache.row(i);
        let row_j = cache.row(j);
        let eta = (row_i[i] + row_j[j] - 2.0 * row_i[j]).max(TAU);
        let delta = (violation / eta).min(c - alpha[i]).min(alpha[j]);
        alpha[i] += delta;
        alpha[j] -= delta;
        alpha[i] = alpha[i].clamp(0.0, c);
        alpha[j] = alpha[j].clamp(0.0, c);
        for t in 0..n {
            gradient[t] += delta * (row_i[t] - row_j[t]);
        }
    }
    if !converged {
        return Err(Error::NotConverged { iterations: iterations + 1, violation });
    }

    // rho from the KKT conditions: free vectors sit exactly on the margin.
    let free: Vec<usize> =
        (0..n).filter(|&t| alpha[t] > bound_eps && alpha[t] < c - bound_eps).collect();
    let rho = if !free.is_empty() {
        free.iter().map(|&t| gradient[t]).sum::<f64>() / free.len() as f64
    } else {
        let lower = (0..n)
            .filter(|&t| alpha[t] >= c - bound_eps)
            .map(|t| gradient[t])
            .fold(f64::NEG_INFINITY, f64::max);
        let upper = (0..n)
            .filter(|&t| alpha[t] <= bound_eps)
            .map(|t| gradient[t])
            .fold(f64::INFINITY, f64::min);
        match (lower.is_finite(), upper.is_finite()) {
            (true, true) => 0.5 * (lower + upper),
            (true, false) => lower,
            (false, true) => upper,
            (false, false) => 0.0,
        }
    };

    let objective = 0.5 * (0..n).map(|t| alpha[t] * gradient[t]).sum::<f64>();
    let sv_idx: Vec<usize> = (0..n).filter(|&t| alpha[t] > bound_eps).collect();
    let dual_coefs: Vec<f64> = sv_idx.iter().map(|&t| alpha[t]).collect();
    Ok(OcSvmModel {
        support_vectors: train.select_rows(&sv_idx),
        dual_coefs,
        rho,
        gamma,
        nu: params.nu,
        objective,
        n_train: n,
    })
}

impl OcSvmModel {
    pub fn n_support_vectors(&self) -> usize {
        self.dual_coefs.len()
    }

    /// Support-vector fraction of the training set.
    pub fn sv_fraction(&self) -> f64 {
        self.dual_coefs.len() as f64 / self.n_train as f64
    }

    pub fn dual_coefs(&self) -> &[f64] {
        &self.dual_coefs
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// Dual objective value attained by the solver.
    pub fn dual_objective(&self) -> f64 {
        self.objective
    }
}

impl Scorer for OcSvmModel {
    fn dim(&self) -> usize {
        self.support_vectors.ncols()
    }

    fn score(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.support_vectors.ncols() {
            return Err(Error::DimMismatch {
                expected: self.support_vectors.ncols(),
                found: x.len(),
            });
        }
        let kernel_sum: f64 = self
            .support_vectors
            .rows_iter()
            .zip(&self.dual_coefs)
            .map(|(sv, a)| a * rbf(self.gamma, sv, x))
            .sum();
        Ok(self.rho - kernel_sum)
    }
}
