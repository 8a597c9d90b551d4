//! Hypersphere embedding detectors.
//!
//! Deep SVDD trains an encoder to contract normal samples around a fixed
//! center `c` (the mean embedding of the training data under the initial
//! weights, frozen thereafter), minimizing mean squared distance to `c`
//! plus a Frobenius weight penalty. The score of a sample is its squared
//! embedding distance to `c`.
//!
//! Deep SAD adds labeled anomalies: each contributes the reciprocal
//! `eta / (d^2 + eps)` of its squared center distance, pushing known
//! anomalies away from the center. With no labeled samples the objective,
//! the batch schedule, and therefore the whole parameter trajectory reduce
//! to Deep SVDD exactly.

use rand::seq::SliceRandom;

use crate::data::RngStream;
use crate::deep::{encoder_spec, matrix_to_f32, to_f32_row, DeepConfig};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::nn::{
    backward_sample, forward_cached, forward_sample, NetParams, NetSpec, OptimizerState, Scalar,
};
use crate::shallow::Scorer;

/// Guard added to squared distances inside the reciprocal labeled term.
pub const INVERSE_DISTANCE_EPS: f64 = 1e-6;

/// Labeled-anomaly loss term for a squared center distance.
pub(crate) fn labeled_term(d_sq: f64) -> f64 {
    1.0 / (d_sq + INVERSE_DISTANCE_EPS)
}

/// Trained Deep SVDD model.
#[derive(Clone, Debug)]
pub struct DeepSvddModel {
    pub spec: NetSpec,
    pub params: NetParams<f32>,
    /// Hypersphere center, fixed before training and never updated.
    pub center: Vec<f64>,
    pub pretrained: bool,
    /// Full-train objective before training and after each epoch.
    pub epoch_objectives: Vec<f64>,
}

/// Trained Deep SAD model.
#[derive(Clone, Debug)]
pub struct DeepSadModel {
    pub spec: NetSpec,
    pub params: NetParams<f32>,
    pub center: Vec<f64>,
    pub eta: f64,
    pub n_unlabeled: usize,
    pub n_labeled: usize,
    pub epoch_objectives: Vec<f64>,
}

fn embed<T: Scalar>(spec: &NetSpec, params: &NetParams<T>, x: &[T]) -> Result<Vec<f64>> {
    Ok(forward_sample(spec, params, x)?.iter().map(|v| v.into_f64()).collect())
}

fn center_distance_sq(embedding: &[f64], center: &[f64]) -> f64 {
    embedding.iter().zip(center).map(|(e, c)| (e - c) * (e - c)).sum()
}

/// Mean embedding of `data` under the given (initial) weights.
///
/// Accumulated in f64, so the result is permutation-invariant to well below
/// 1e-12 regardless of the training float width.
pub fn dsvdd_init_center<T: Scalar>(
    spec: &NetSpec,
    params: &NetParams<T>,
    data: &[Vec<T>],
) -> Result<Vec<f64>> {
    if data.is_empty() {
        return Err(Error::EmptyTrain { context: "center initialization" });
    }
    let latent = spec.output_shape()?.flat();
    let mut center = vec![0.0f64; latent];
    for x in data {
        let e = embed(spec, params, x)?;
        for (c, v) in center.iter_mut().zip(&e) {
            *c += v;
        }
    }
    let n = data.len() as f64;
    center.iter_mut().for_each(|c| *c /= n);
    Ok(center)
}

/// Batch loss and summed data gradients of the hypersphere objective.
///
/// The batch estimate is `(1/B) (sum_u d^2 + eta * sum_l 1/(d^2 + eps))`
/// over `B = |unlabeled| + |labeled|` batch samples. Generic over float
/// width; the f64 instantiation backs the finite-difference checks.
pub fn hypersphere_batch_gradients<T: Scalar>(
    spec: &NetSpec,
    params: &NetParams<T>,
    center: &[f64],
    unlabeled: &[Vec<T>],
    labeled: &[Vec<T>],
    eta: f64,
) -> Result<(f64, NetParams<T>)> {
    let b = unlabeled.len() + labeled.len();
    if b == 0 {
        return Err(Error::EmptyTrain { context: "hypersphere batch" });
    }
    let inv_b = 1.0 / b as f64;
    let mut grads = params.zeros_like();
    let mut loss = 0.0;
    for x in unlabeled {
        let acts = forward_cached(spec, params, x)?;
        let out = acts.last().expect("non-empty");
        let d_sq = out
            .iter()
            .zip(center)
            .map(|(o, c)| (o.into_f64() - c) * (o.into_f64() - c))
            .sum::<f64>();
        loss += inv_b * d_sq;
        let out_grad: Vec<T> = out
            .iter()
            .zip(center)
            .map(|(o, c)| T::from_f64(2.0 * (o.into_f64() - c) * inv_b))
            .collect();
        backward_sample(spec, params, &acts, &out_grad, &mut grads)?;
    }
    for x in labeled {
        let acts = forward_cached(spec, params, x)?;
        let out = acts.last().expect("non-empty");
        let d_sq = out
            .iter()
            .zip(center)
            .map(|(o, c)| (o.into_f64() - c) * (o.into_f64() - c))
            .sum::<f64>();
        let guarded = d_sq + INVERSE_DISTANCE_EPS;
        loss += inv_b * eta / guarded;
        // d/dPhi of eta/(d^2 + eps) = -eta * 2(Phi - c) / (d^2 + eps)^2.
        let coef = -eta * inv_b / (guarded * guarded);
        let out_grad: Vec<T> = out
            .iter()
            .zip(center)
            .map(|(o, c)| T::from_f64(2.0 * (o.into_f64() - c) * coef))
            .collect();
        backward_sample(spec, params, &acts, &out_grad, &mut grads)?;
    }
    Ok((loss, grads))
}

/// Full Deep SVDD objective: mean squared center distance plus `(lambda/2)||W||^2`.
pub fn dsvdd_objective<T: Scalar>(
    spec: &NetSpec,
    params: &NetParams<T>,
    center: &[f64],
    data: &[Vec<T>],
    lambda: f64,
) -> Result<f64> {
    let mut total = 0.0;
    for x in data {
        total += center_distance_sq(&embed(spec, params, x)?, center);
    }
    Ok(total / data.len() as f64 + 0.5 * lambda * params.frobenius_sq())
}

/// Full Deep SAD objective; with no labeled samples it equals the Deep
/// SVDD objective on the same data.
pub fn dsad_objective<T: Scalar>(
    spec: &NetSpec,
    params: &NetParams<T>,
    center: &[f64],
    unlabeled: &[Vec<T>],
    labeled: &[Vec<T>],
    eta: f64,
    lambda: f64,
) -> Result<f64> {
    let denom = (unlabeled.len() + labeled.len()) as f64;
    let mut unlabeled_sum = 0.0;
    for x in unlabeled {
        unlabeled_sum += center_distance_sq(&embed(spec, params, x)?, center);
    }
    let mut labeled_sum = 0.0;
    for x in labeled {
        labeled_sum += labeled_term(center_distance_sq(&embed(spec, params, x)?, center));
    }
    Ok(unlabeled_sum / denom + eta * labeled_sum / denom + 0.5 * lambda * params.frobenius_sq())
}

/// Shared training loop. With an empty labeled set every draw, batch, and
/// arithmetic operation matches the pure Deep SVDD run bit for bit.
fn train_hypersphere(
    spec: &NetSpec,
    init: NetParams<f32>,
    unlabeled: Vec<Vec<f32>>,
    labeled: Vec<Vec<f32>>,
    eta: f64,
    cfg: &DeepConfig,
    stream: &RngStream,
) -> Result<(NetParams<f32>, Vec<f64>, Vec<f64>)> {
    let center = dsvdd_init_center(spec, &init, &unlabeled)?;
    let mut params = init;
    let mut optimizer = OptimizerState::new(cfg.optimizer, &params);
    let lambda = cfg.optimizer.weight_decay;
    let mut objectives =
        vec![dsad_objective(spec, &params, &center, &unlabeled, &labeled, eta, lambda)?];

    let n = unlabeled.len();
    let m = labeled.len();
    let batch = cfg.batch_size.max(1);
    // Proportional mixing: unlabeled samples fill `bu` slots per batch and
    // the labeled set is spread evenly across the epoch's batches.
    let bu = ((batch * n) as f64 / (n + m) as f64).round().max(1.0) as usize;
    let mut u_idx: Vec<usize> = (0..n).collect();
    let mut l_idx: Vec<usize> = (0..m).collect();
    for epoch in 0..cfg.epochs_hypersphere {
        let mut u_rng = stream.fork("hypersphere.epoch.unlabeled", epoch as u64).rng();
        u_idx.shuffle(&mut u_rng);
        let mut l_rng = stream.fork("hypersphere.epoch.labeled", epoch as u64).rng();
        l_idx.shuffle(&mut l_rng);

        let n_batches = n.div_ceil(bu);
        for batch_no in 0..n_batches {
            let u_slice = &u_idx[batch_no * bu..((batch_no + 1) * bu).min(n)];
            let l_lo = batch_no * m / n_batches;
            let l_hi = (batch_no + 1) * m / n_batches;
            let batch_u: Vec<Vec<f32>> = u_slice.iter().map(|&i| unlabeled[i].clone()).collect();
            let batch_l: Vec<Vec<f32>> =
                l_idx[l_lo..l_hi].iter().map(|&i| labeled[i].clone()).collect();
            let (loss, grads) =
                hypersphere_batch_gradients(spec, &params, &center, &batch_u, &batch_l, eta)?;
            if !loss.is_finite() {
                return Err(Error::NonFinite {
                    context: format!("hypersphere loss at epoch {epoch}, batch {batch_no}"),
                });
            }
            optimizer.step(&mut params, &grads).map_err(|e| Error::NonFinite {
                context: format!("epoch {epoch}, batch {batch_no}: {e}"),
            })?;
        }
        objectives
            .push(dsad_objective(spec, &params, &center, &unlabeled, &labeled, eta, lambda)?);
    }

    // Collapse check: if everything maps (numerically) onto the center the
    // scores carry no information.
    let mean_dist = unlabeled
        .iter()
        .map(|x| Ok(center_distance_sq(&embed(spec, &params, x)?, &center)))
        .sum::<Result<f64>>()?
        / n as f64;
    if mean_dist < 1e-8 {
        log::warn!("hypersphere collapse suspected: mean center distance {mean_dist:.3e}");
    }
    Ok((params, center, objectives))
}

/// Trains Deep SVDD, optionally starting from pretrained encoder weights.
pub fn dsvdd_train(
    train: &Matrix,
    pretrained_encoder: Option<NetParams<f32>>,
    cfg: &DeepConfig,
    stream: &RngStream,
) -> Result<DeepSvddModel> {
    if train.is_empty() {
        return Err(Error::EmptyTrain { context: "Deep SVDD training" });
    }
    let spec = encoder_spec(train.ncols(), cfg.latent_dim, cfg.bias)?;
    let pretrained = pretrained_encoder.is_some();
    let init = match pretrained_encoder {
        Some(p) => {
            let expected = spec.param_count()?;
            let got: usize = p.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum();
            if got != expected {
                return Err(Error::Shape(format!(
                    "pretrained encoder has {got} parameters, architecture needs {expected}"
                )));
            }
            p
        }
        None => NetParams::init(&spec, &stream.fork("dsvdd.init", 0))?,
    };
    let (params, center, epoch_objectives) = train_hypersphere(
        &spec,
        init,
        matrix_to_f32(train),
        Vec::new(),
        cfg.eta,
        cfg,
        stream,
    )?;
    Ok(DeepSvddModel { spec, params, center, pretrained, epoch_objectives })
}

/// Trains Deep SAD on unlabeled samples plus labeled anomalies.
pub fn dsad_train(
    unlabeled: &Matrix,
    labeled: &Matrix,
    cfg: &DeepConfig,
    stream: &RngStream,
) -> Result<DeepSadModel> {
    if unlabeled.is_empty() {
        return Err(Error::EmptyTrain { context: "Deep SAD training" });
    }
    if !labeled.is_empty() && labeled.ncols() != unlabeled.ncols() {
        return Err(Error::DimMismatch { expected: unlabeled.ncols(), found: labeled.ncols() });
    }
    let spec = encoder_spec(unlabeled.ncols(), cfg.latent_dim, cfg.bias)?;
    let init = NetParams::init(&spec, &stream.fork("dsvdd.init", 0))?;
    let (params, center, epoch_objectives) = train_hypersphere(
        &spec,
        init,
        matrix_to_f32(unlabeled),
        matrix_to_f32(labeled),
        cfg.eta,
        cfg,
        stream,
    )?;
    Ok(DeepSadModel {
        spec,
        params,
        center,
        eta: cfg.eta,
        n_unlabeled: unlabeled.nrows(),
        n_labeled: labeled.nrows(),
        epoch_objectives,
    })
}

fn hypersphere_score(
    spec: &NetSpec,
    params: &NetParams<f32>,
    center: &[f64],
    x: &[f64],
) -> Result<f64> {
    let e = embed(spec, params, &to_f32_row(x))?;
    Ok(center_distance_sq(&e, center))
}

impl DeepSvddModel {
    /// Mean squared center distance of a sample set.
    pub fn mean_center_distance(&self, data: &Matrix) -> Result<f64> {
        let mut total = 0.0;
        for row in data.rows_iter() {
            total += self.score(row)?;
        }
        Ok(total / data.nrows() as f64)
    }
}

impl Scorer for DeepSvddModel {
    fn dim(&self) -> usize {
        self.spec.input_len
    }

    fn score(&self, x: &[f64]) -> Result<f64> {
        hypersphere_score(&self.spec, &self.params, &self.center, x)
    }
}

impl Scorer for DeepSadModel {
    fn dim(&self) -> usize {
        self.spec.input_len
    }

    fn score(&self, x: &[f64]) -> Result<f64> {
        hypersphere_score(&self.spec, &self.params, &self.center, x)
    }
}
