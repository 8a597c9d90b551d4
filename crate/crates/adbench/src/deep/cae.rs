//! Convolutional autoencoder scored by reconstruction error.
//!
//! The squared Euclidean reconstruction error is both the training
//! objective and the anomaly score: trained on normal samples only, the
//! network reproduces anomalous inputs poorly.

use crate::data::RngStream;
use crate::deep::{cae_spec, matrix_to_f32, to_f32_row, DeepConfig, ENCODER_LAYERS};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::nn::{
    backward_sample, forward_cached, forward_sample, NetParams, NetSpec, OptimizerState, Scalar,
};
use crate::shallow::Scorer;

use rand::seq::SliceRandom;

/// Trained autoencoder.
#[derive(Clone, Debug)]
pub struct CaeModel {
    pub spec: NetSpec,
    pub params: NetParams<f32>,
    /// Mean training reconstruction error before training and after each epoch.
    pub epoch_losses: Vec<f64>,
}

/// Mean reconstruction loss and summed data gradients over one batch.
///
/// Generic over float width so the same code path serves f32 training and
/// f64 gradient checking.
pub fn cae_batch_gradients<T: Scalar>(
    spec: &NetSpec,
    params: &NetParams<T>,
    batch: &[Vec<T>],
) -> Result<(f64, NetParams<T>)> {
    let b = batch.len();
    let mut grads = params.zeros_like();
    let mut loss = 0.0;
    let scale = T::from_f64(2.0 / b as f64);
    for x in batch {
        let acts = forward_cached(spec, params, x)?;
        let out = acts.last().expect("non-empty activations");
        let mut out_grad = Vec::with_capacity(out.len());
        for (o, t) in out.iter().zip(x) {
            let diff = *o - *t;
            loss += diff.into_f64() * diff.into_f64();
            out_grad.push(diff * scale);
        }
        backward_sample(spec, params, &acts, &out_grad, &mut grads)?;
    }
    Ok((loss / b as f64, grads))
}

fn mean_reconstruction_error(spec: &NetSpec, params: &NetParams<f32>, data: &[Vec<f32>]) -> f64 {
    let total: f64 = data
        .iter()
        .map(|x| {
            let out = forward_sample(spec, params, x).expect("shapes fixed at construction");
            out.iter().zip(x).map(|(o, t)| {
                let d = (o - t) as f64;
                d * d
            }).sum::<f64>()
        })
        .sum();
    total / data.len() as f64
}

/// Trains the autoencoder on (min-max normalized) samples.
pub fn cae_train(train: &Matrix, cfg: &DeepConfig, stream: &RngStream) -> Result<CaeModel> {
    if train.is_empty() {
        return Err(Error::EmptyTrain { context: "autoencoder training" });
    }
    let spec = cae_spec(train.ncols(), cfg.latent_dim, cfg.bias)?;
    let data = matrix_to_f32(train);
    let mut params: NetParams<f32> = NetParams::init(&spec, &stream.fork("cae.init", 0))?;
    let mut optimizer = OptimizerState::new(cfg.optimizer, &params);
    let mut epoch_losses = vec![mean_reconstruction_error(&spec, &params, &data)];

    let mut indices: Vec<usize> = (0..data.len()).collect();
    for epoch in 0..cfg.epochs_cae {
        let mut rng = stream.fork("cae.epoch", epoch as u64).rng();
        indices.shuffle(&mut rng);
        for (batch_no, chunk) in indices.chunks(cfg.batch_size.max(1)).enumerate() {
            let batch: Vec<Vec<f32>> = chunk.iter().map(|&i| data[i].clone()).collect();
            let (loss, grads) = cae_batch_gradients(&spec, &params, &batch)?;
            if !loss.is_finite() {
                return Err(Error::NonFinite {
                    context: format!("autoencoder loss at epoch {epoch}, batch {batch_no}"),
                });
            }
            optimizer.step(&mut params, &grads).map_err(|e| Error::NonFinite {
                context: format!("epoch {epoch}, batch {batch_no}: {e}"),
            })?;
        }
        epoch_losses.push(mean_reconstruction_error(&spec, &params, &data));
    }
    Ok(CaeModel { spec, params, epoch_losses })
}

impl CaeModel {
    /// Reconstruction of a single sample.
    pub fn reconstruct(&self, x: &[f64]) -> Result<Vec<f64>> {
        let out = forward_sample(&self.spec, &self.params, &to_f32_row(x))?;
        Ok(out.iter().map(|&v| v as f64).collect())
    }

    /// Encoder half of the architecture with its trained parameters.
    pub fn encoder(&self) -> (NetSpec, NetParams<f32>) {
        let spec = NetSpec {
            input_channels: self.spec.input_channels,
            input_len: self.spec.input_len,
            layers: self.spec.layers[..ENCODER_LAYERS].to_vec(),
        };
        let params = NetParams { layers: self.params.layers[..ENCODER_LAYERS].to_vec() };
        (spec, params)
    }
}

impl Scorer for CaeModel {
    fn dim(&self) -> usize {
        self.spec.input_len
    }

    fn score(&self, x: &[f64]) -> Result<f64> {
        let rec = self.reconstruct(x)?;
        Ok(rec.iter().zip(x).map(|(r, t)| (r - t) * (r - t)).sum())
    }
}
