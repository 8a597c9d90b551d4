//! Deep detectors: reconstruction autoencoder, hypersphere embedding
//! (Deep SVDD), and its semi-supervised extension (Deep SAD).
//!
//! All three share one LeNet-style 1-D convolutional architecture so the
//! autoencoder's trained encoder can initialize the hypersphere network
//! unchanged. Layers are bias-free by default, which blocks the trivial
//! constant-map solution that would collapse every embedding onto the
//! hypersphere center.

pub mod cae;
pub mod svdd;

pub use cae::{cae_batch_gradients, cae_train, CaeModel};
pub use svdd::{
    dsad_train, dsvdd_init_center, dsvdd_objective, dsvdd_train, hypersphere_batch_gradients,
    DeepSadModel, DeepSvddModel,
};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::nn::{LayerSpec, NetSpec, OptimizerConfig};

/// Training configuration shared by the deep detectors.
#[derive(Clone, Debug, PartialEq)]
pub struct DeepConfig {
    /// Autoencoder training epochs.
    pub epochs_cae: usize,
    /// Hypersphere (Deep SVDD / Deep SAD) training epochs.
    pub epochs_hypersphere: usize,
    pub batch_size: usize,
    /// Weight of the labeled-anomaly term in the semi-supervised objective.
    pub eta: f64,
    pub latent_dim: usize,
    /// Bias terms on parametric layers (off by default, see module docs).
    pub bias: bool,
    pub optimizer: OptimizerConfig,
}

impl Default for DeepConfig {
    fn default() -> Self {
        Self {
            epochs_cae: 10,
            epochs_hypersphere: 20,
            batch_size: 128,
            eta: 1.0,
            latent_dim: 32,
            bias: false,
            optimizer: OptimizerConfig::default(),
        }
    }
}

/// Number of layers forming the encoder half of [`cae_spec`].
pub const ENCODER_LAYERS: usize = 7;

/// Encoder: two conv/pool stages into a dense latent head.
pub fn encoder_spec(input_len: usize, latent_dim: usize, bias: bool) -> Result<NetSpec> {
    if !input_len.is_multiple_of(4) || input_len == 0 {
        return Err(Error::Shape(format!("input length {input_len} must be divisible by 4")));
    }
    if latent_dim == 0 {
        return Err(Error::Shape("latent dim must be positive".into()));
    }
    Ok(NetSpec {
        input_channels: 1,
        input_len,
        layers: vec![
            LayerSpec::Conv1d { out_channels: 8, kernel: 5, stride: 1, bias },
            LayerSpec::LeakyRelu { slope: 0.1 },
            LayerSpec::MaxPool1d { width: 2 },
            LayerSpec::Conv1d { out_channels: 4, kernel: 5, stride: 1, bias },
            LayerSpec::LeakyRelu { slope: 0.1 },
            LayerSpec::MaxPool1d { width: 2 },
            LayerSpec::Dense { out_dim: latent_dim, bias },
        ],
    })
}

/// Full autoencoder: [`encoder_spec`] mirrored by an upsampling decoder.
pub fn cae_spec(input_len: usize, latent_dim: usize, bias: bool) -> Result<NetSpec> {
    let mut spec = encoder_spec(input_len, latent_dim, bias)?;
    let quarter = input_len / 4;
    spec.layers.extend([
        LayerSpec::Dense { out_dim: 4 * quarter, bias },
        LayerSpec::LeakyRelu { slope: 0.1 },
        LayerSpec::Reshape { channels: 4 },
        LayerSpec::Upsample1d { factor: 2 },
        LayerSpec::TransposeConv1d { out_channels: 8, kernel: 5, stride: 1, bias },
        LayerSpec::LeakyRelu { slope: 0.1 },
        LayerSpec::Upsample1d { factor: 2 },
        LayerSpec::TransposeConv1d { out_channels: 1, kernel: 5, stride: 1, bias },
    ]);
    debug_assert_eq!(ENCODER_LAYERS, 7);
    Ok(spec)
}

pub(crate) fn matrix_to_f32(m: &Matrix) -> Vec<Vec<f32>> {
    m.rows_iter().map(|r| r.iter().map(|&v| v as f32).collect()).collect()
}

pub(crate) fn to_f32_row(x: &[f64]) -> Vec<f32> {
    x.iter().map(|&v| v as f32).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::Shape;

    #[test]
    fn default_architecture_parameter_count() {
        // conv1 1*8*5 = 40, conv2 8*4*5 = 160, dense 200*32 = 6400 per side,
        // tconv1 4*8*5 = 160, tconv2 8*1*5 = 40: 6600 + 6600 = 13200.
        let enc = encoder_spec(200, 32, false).unwrap();
        assert_eq!(enc.param_count().unwrap(), 6600);
        let cae = cae_spec(200, 32, false).unwrap();
        assert_eq!(cae.param_count().unwrap(), 13_200);
        // With biases: +8 +4 +32 encoder, +200 +8 +1 decoder.
        let cae_b = cae_spec(200, 32, true).unwrap();
        assert_eq!(cae_b.param_count().unwrap(), 13_200 + 44 + 209);
    }

    #[test]
    fn autoencoder_output_mirrors_input() {
        let spec = cae_spec(200, 32, false).unwrap();
        assert_eq!(spec.output_shape().unwrap(), Shape { channels: 1, len: 200 });
        let enc = encoder_spec(200, 32, false).unwrap();
        assert_eq!(enc.output_shape().unwrap(), Shape { channels: 32, len: 1 });
        // The encoder is a prefix of the full autoencoder.
        assert_eq!(&spec.layers[..ENCODER_LAYERS], &enc.layers[..]);
    }

    #[test]
    fn input_length_must_be_divisible_by_four() {
        assert!(encoder_spec(201, 32, false).is_err());
        assert!(cae_spec(202, 32, false).is_err());
    }
}
