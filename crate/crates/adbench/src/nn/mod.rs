//! Minimal differentiable engine for small 1-D convolutional networks.
//!
//! Supports exactly the layer set needed by the deep detectors: 1-D
//! convolution and transposed convolution (odd kernels, zero padding that
//! preserves length at stride 1), leaky ReLU, non-overlapping max pooling,
//! nearest-neighbor upsampling, dense layers, and a shape-only reshape.
//! Feature maps are flat channel-major buffers; the engine is generic over
//! `f32` (training) and `f64` (gradient checking).

pub mod checkpoint;
mod engine;
pub mod optim;

pub use engine::{backward_batch, backward_sample, forward_batch, forward_cached, forward_sample};
pub use optim::{OptimizerConfig, OptimizerKind, OptimizerState};

use rand::Rng;

use crate::data::RngStream;
use crate::error::{Error, Result};

/// Float type the engine is generic over.
pub trait Scalar:
    num_traits::Float + std::fmt::Debug + std::iter::Sum + Send + Sync + 'static
{
    fn from_f64(x: f64) -> Self;
    fn into_f64(self) -> f64;
}

impl Scalar for f32 {
    fn from_f64(x: f64) -> Self {
        x as f32
    }

    fn into_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }

    fn into_f64(self) -> f64 {
        self
    }
}

/// Per-sample feature-map shape.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Shape {
    pub channels: usize,
    pub len: usize,
}

impl Shape {
    pub fn flat(&self) -> usize {
        self.channels * self.len
    }
}

/// One layer of the network.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum LayerSpec {
    Conv1d { out_channels: usize, kernel: usize, stride: usize, bias: bool },
    LeakyRelu { slope: f64 },
    MaxPool1d { width: usize },
    Dense { out_dim: usize, bias: bool },
    Upsample1d { factor: usize },
    TransposeConv1d { out_channels: usize, kernel: usize, stride: usize, bias: bool },
    /// Redistributes the flat feature map into `channels` channels.
    Reshape { channels: usize },
}

impl LayerSpec {
    /// Output shape for a given input shape.
    pub fn output_shape(&self, input: Shape) -> Result<Shape> {
        match *self {
            LayerSpec::Conv1d { out_channels, kernel, stride, .. } => {
                check_kernel(kernel, stride)?;
                let pad = (kernel - 1) / 2;
                if input.len + 2 * pad < kernel {
                    return Err(Error::Shape(format!(
                        "conv kernel {kernel} exceeds padded input length {}",
                        input.len
                    )));
                }
                Ok(Shape { channels: out_channels, len: (input.len + 2 * pad - kernel) / stride + 1 })
            }
            LayerSpec::LeakyRelu { .. } => Ok(input),
            LayerSpec::MaxPool1d { width } => {
                if width == 0 || !input.len.is_multiple_of(width) {
                    return Err(Error::Shape(format!(
                        "pool width {width} must divide input length {}",
                        input.len
                    )));
                }
                Ok(Shape { channels: input.channels, len: input.len / width })
            }
            LayerSpec::Dense { out_dim, .. } => {
                if out_dim == 0 {
                    return Err(Error::Shape("dense output dim must be positive".into()));
                }
                Ok(Shape { channels: out_dim, len: 1 })
            }
            LayerSpec::Upsample1d { factor } => {
                if factor == 0 {
                    return Err(Error::Shape("upsample factor must be positive".into()));
                }
                Ok(Shape { channels: input.channels, len: input.len * factor })
            }
            LayerSpec::TransposeConv1d { out_channels, kernel, stride, .. } => {
                check_kernel(kernel, stride)?;
                let pad = (kernel - 1) / 2;
                let len = (input.len - 1) * stride + kernel;
                if len < 2 * pad {
                    return Err(Error::Shape("transpose conv output underflows padding".into()));
                }
                Ok(Shape { channels: out_channels, len: len - 2 * pad })
            }
            LayerSpec::Reshape { channels } => {
                if channels == 0 || !input.flat().is_multiple_of(channels) {
                    return Err(Error::Shape(format!(
                        "cannot reshape {} values into {channels} channels",
                        input.flat()
                    )));
                }
                Ok(Shape { channels, len: input.flat() / channels })
            }
        }
    }

    /// (weight count, bias count) given the input shape.
    pub fn param_counts(&self, input: Shape) -> (usize, usize) {
        match *self {
            LayerSpec::Conv1d { out_channels, kernel, bias, .. } => {
                (out_channels * input.channels * kernel, if bias { out_channels } else { 0 })
            }
            LayerSpec::Dense { out_dim, bias } => {
                (out_dim * input.flat(), if bias { out_dim } else { 0 })
            }
            LayerSpec::TransposeConv1d { out_channels, kernel, bias, .. } => {
                (input.channels * out_channels * kernel, if bias { out_channels } else { 0 })
            }
            _ => (0, 0),
        }
    }

    fn fans(&self, input: Shape) -> (usize, usize) {
        match *self {
            LayerSpec::Conv1d { out_channels, kernel, .. } => {
                (input.channels * kernel, out_channels * kernel)
            }
            LayerSpec::Dense { out_dim, .. } => (input.flat(), out_dim),
            LayerSpec::TransposeConv1d { out_channels, kernel, .. } => {
                (input.channels * kernel, out_channels * kernel)
            }
            _ => (0, 0),
        }
    }
}

fn check_kernel(kernel: usize, stride: usize) -> Result<()> {
    if kernel == 0 || kernel.is_multiple_of(2) {
        return Err(Error::Shape(format!("kernel size must be odd and positive, got {kernel}")));
    }
    if stride == 0 {
        return Err(Error::Shape("stride must be positive".into()));
    }
    Ok(())
}

/// Network architecture: input shape plus an ordered layer list.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NetSpec {
    pub input_channels: usize,
    pub input_len: usize,
    pub layers: Vec<LayerSpec>,
}

impl NetSpec {
    pub fn input_shape(&self) -> Shape {
        Shape { channels: self.input_channels, len: self.input_len }
    }

    /// Shape before each layer plus the output shape; validates the chain.
    pub fn shapes(&self) -> Result<Vec<Shape>> {
        let mut shapes = vec![self.input_shape()];
        for layer in &self.layers {
            let next = layer.output_shape(*shapes.last().expect("non-empty"))?;
            shapes.push(next);
        }
        Ok(shapes)
    }

    pub fn output_shape(&self) -> Result<Shape> {
        Ok(*self.shapes()?.last().expect("non-empty"))
    }

    /// Total number of trainable parameters.
    pub fn param_count(&self) -> Result<usize> {
        let shapes = self.shapes()?;
        Ok(self
            .layers
            .iter()
            .zip(&shapes)
            .map(|(l, s)| {
                let (w, b) = l.param_counts(*s);
                w + b
            })
            .sum())
    }
}

/// Parameters of one layer (either may be empty).
#[derive(Clone, Debug, PartialEq)]
pub struct LayerParams<T> {
    pub weights: Vec<T>,
    pub bias: Vec<T>,
}

/// Ordered parameter tensors of a whole network.
#[derive(Clone, Debug, PartialEq)]
pub struct NetParams<T> {
    pub layers: Vec<LayerParams<T>>,
}

impl<T: Scalar> NetParams<T> {
    /// Glorot-uniform initialization; biases start at zero.
    pub fn init(spec: &NetSpec, stream: &RngStream) -> Result<Self> {
        let shapes = spec.shapes()?;
        let mut layers = Vec::with_capacity(spec.layers.len());
        for (idx, (layer, shape)) in spec.layers.iter().zip(&shapes).enumerate() {
            let (w_len, b_len) = layer.param_counts(*shape);
            let mut weights = Vec::with_capacity(w_len);
            if w_len > 0 {
                let (fan_in, fan_out) = layer.fans(*shape);
                let a = (6.0 / (fan_in + fan_out) as f64).sqrt();
                let mut rng = stream.fork("nn.init", idx as u64).rng();
                for _ in 0..w_len {
                    weights.push(T::from_f64(rng.random_range(-a..a)));
                }
            }
            layers.push(LayerParams { weights, bias: vec![T::zero(); b_len] });
        }
        Ok(Self { layers })
    }

    /// Zero parameters with the same shapes; used for gradients and moments.
    pub fn zeros_like(&self) -> Self {
        Self {
            layers: self
                .layers
                .iter()
                .map(|l| LayerParams {
                    weights: vec![T::zero(); l.weights.len()],
                    bias: vec![T::zero(); l.bias.len()],
                })
                .collect(),
        }
    }

    pub fn all_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weights.iter().chain(&l.bias).all(|v| v.is_finite()))
    }

    /// Converts between float widths.
    pub fn convert<U: Scalar>(&self) -> NetParams<U> {
        NetParams {
            layers: self
                .layers
                .iter()
                .map(|l| LayerParams {
                    weights: l.weights.iter().map(|v| U::from_f64(v.into_f64())).collect(),
                    bias: l.bias.iter().map(|v| U::from_f64(v.into_f64())).collect(),
                })
                .collect(),
        }
    }

    /// Sum of squared weights over all layers (bias excluded).
    pub fn frobenius_sq(&self) -> f64 {
        self.layers
            .iter()
            .flat_map(|l| &l.weights)
            .map(|v| v.into_f64() * v.into_f64())
            .sum()
    }
}

/// `(lambda / 2) * sum_l ||W_l||_F^2` regularization value.
pub fn weight_decay_loss<T: Scalar>(params: &NetParams<T>, lambda: f64) -> f64 {
    0.5 * lambda * params.frobenius_sq()
}

/// Gradient of the regularizer: `lambda * W` per layer, zero for biases.
pub fn weight_decay_grad<T: Scalar>(params: &NetParams<T>, lambda: f64) -> NetParams<T> {
    let l = T::from_f64(lambda);
    NetParams {
        layers: params
            .layers
            .iter()
            .map(|layer| LayerParams {
                weights: layer.weights.iter().map(|&w| w * l).collect(),
                bias: vec![T::zero(); layer.bias.len()],
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(layers: Vec<LayerSpec>) -> NetSpec {
        NetSpec { input_channels: 1, input_len: 8, layers }
    }

    #[test]
    fn shape_chain_for_conv_pool_dense() {
        let net = spec(vec![
            LayerSpec::Conv1d { out_channels: 4, kernel: 3, stride: 1, bias: true },
            LayerSpec::MaxPool1d { width: 2 },
            LayerSpec::Dense { out_dim: 5, bias: true },
        ]);
        let shapes = net.shapes().unwrap();
        assert_eq!(shapes[1], Shape { channels: 4, len: 8 });
        assert_eq!(shapes[2], Shape { channels: 4, len: 4 });
        assert_eq!(shapes[3], Shape { channels: 5, len: 1 });
        // conv: 4*1*3 + 4, dense: 5*16 + 5
        assert_eq!(net.param_count().unwrap(), 12 + 4 + 80 + 5);
    }

    #[test]
    fn transpose_conv_mirrors_length_at_stride_one() {
        let net = spec(vec![LayerSpec::TransposeConv1d {
            out_channels: 2,
            kernel: 5,
            stride: 1,
            bias: false,
        }]);
        assert_eq!(net.output_shape().unwrap(), Shape { channels: 2, len: 8 });
    }

    #[test]
    fn invalid_shapes_are_rejected() {
        assert!(spec(vec![LayerSpec::MaxPool1d { width: 3 }]).shapes().is_err());
        assert!(spec(vec![LayerSpec::Conv1d { out_channels: 1, kernel: 4, stride: 1, bias: false }])
            .shapes()
            .is_err());
        assert!(spec(vec![LayerSpec::Reshape { channels: 3 }]).shapes().is_err());
    }

    #[test]
    fn init_is_deterministic_and_finite() {
        let net = spec(vec![
            LayerSpec::Conv1d { out_channels: 3, kernel: 3, stride: 1, bias: true },
            LayerSpec::Dense { out_dim: 4, bias: false },
        ]);
        let stream = RngStream::from_root(2).fork("nn.test", 0);
        let a: NetParams<f32> = NetParams::init(&net, &stream).unwrap();
        let b: NetParams<f32> = NetParams::init(&net, &stream).unwrap();
        assert_eq!(a, b);
        assert!(a.all_finite());
        assert_eq!(a.layers[1].bias.len(), 0);
    }

    #[test]
    fn regularizer_gradient_is_lambda_w() {
        let net = spec(vec![LayerSpec::Dense { out_dim: 2, bias: true }]);
        let stream = RngStream::from_root(3).fork("nn.test", 1);
        let params: NetParams<f64> = NetParams::init(&net, &stream).unwrap();
        let lambda = 1e-6;
        let grad = weight_decay_grad(&params, lambda);
        for (p, g) in params.layers[0].weights.iter().zip(&grad.layers[0].weights) {
            assert_eq!(*g, lambda * p);
        }
        assert!(grad.layers[0].bias.iter().all(|&b| b == 0.0));
        let loss = weight_decay_loss(&params, lambda);
        assert!((loss - 0.5 * lambda * params.frobenius_sq()).abs() < 1e-18);
    }
}
