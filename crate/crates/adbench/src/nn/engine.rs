//! Forward and reverse-mode passes.
//!
//! Samples are processed independently (there is no cross-sample state),
//! so a batch pass equals the concatenation of single-sample passes
//! exactly. Max-pool ties route gradient to the first maximum.

use crate::error::{Error, Result};
use crate::nn::{LayerParams, LayerSpec, NetParams, NetSpec, Scalar, Shape};

/// Valid output range `[y_min, y_max]` for kernel tap `t`: the y values
/// with `y * stride + t - pad` inside `[0, in_len)`.
fn tap_range(t: usize, pad: usize, stride: usize, in_len: usize, out_len: usize) -> (usize, usize) {
    let y_min = if t >= pad { 0 } else { (pad - t).div_ceil(stride) };
    let max_num = (in_len + pad).saturating_sub(t);
    if max_num == 0 || out_len == 0 {
        return (1, 0);
    }
    let y_max = ((max_num - 1) / stride).min(out_len - 1);
    (y_min, y_max)
}

fn layer_forward<T: Scalar>(
    layer: &LayerSpec,
    params: &LayerParams<T>,
    input: &[T],
    in_shape: Shape,
    out_shape: Shape,
) -> Vec<T> {
    match *layer {
        LayerSpec::Conv1d { out_channels, kernel, stride, bias } => {
            let pad = (kernel - 1) / 2;
            let (ci, li) = (in_shape.channels, in_shape.len);
            let lo = out_shape.len;
            let mut out = vec![T::zero(); out_channels * lo];
            for o in 0..out_channels {
                let out_row = &mut out[o * lo..(o + 1) * lo];
                if bias {
                    out_row.iter_mut().for_each(|v| *v = params.bias[o]);
                }
                for i in 0..ci {
                    let w = &params.weights[(o * ci + i) * kernel..(o * ci + i + 1) * kernel];
                    let x = &input[i * li..(i + 1) * li];
                    for (t, &wt) in w.iter().enumerate() {
                        let (y_min, y_max) = tap_range(t, pad, stride, li, lo);
                        if y_min > y_max {
                            continue;
                        }
                        let x_off = y_min * stride + t - pad;
                        if stride == 1 {
                            for (oy, &xv) in
                                out_row[y_min..=y_max].iter_mut().zip(&x[x_off..])
                            {
                                *oy = *oy + wt * xv;
                            }
                        } else {
                            for (k, oy) in out_row[y_min..=y_max].iter_mut().enumerate() {
                                *oy = *oy + wt * x[x_off + k * stride];
                            }
                        }
                    }
                }
            }
            out
        }
        LayerSpec::LeakyRelu { slope } => {
            let s = T::from_f64(slope);
            input.iter().map(|&v| if v > T::zero() { v } else { v * s }).collect()
        }
        LayerSpec::MaxPool1d { width } => {
            let (c, lo) = (out_shape.channels, out_shape.len);
            let li = in_shape.len;
            let mut out = vec![T::zero(); c * lo];
            for ch in 0..c {
                for y in 0..lo {
                    let base = ch * li + y * width;
                    let mut best = input[base];
                    for t in 1..width {
                        if input[base + t] > best {
                            best = input[base + t];
                        }
                    }
                    out[ch * lo + y] = best;
                }
            }
            out
        }
        LayerSpec::Dense { out_dim, bias } => {
            let flat = in_shape.flat();
            let mut out = vec![T::zero(); out_dim];
            for (o, slot) in out.iter_mut().enumerate() {
                let w_row = &params.weights[o * flat..(o + 1) * flat];
                let dot: T = w_row.iter().zip(input).map(|(&w, &x)| w * x).sum();
                *slot = if bias { params.bias[o] + dot } else { dot };
            }
            out
        }
        LayerSpec::Upsample1d { factor } => {
            let (c, lo) = (out_shape.channels, out_shape.len);
            let li = in_shape.len;
            let mut out = vec![T::zero(); c * lo];
            for ch in 0..c {
                for y in 0..lo {
                    out[ch * lo + y] = input[ch * li + y / factor];
                }
            }
            out
        }
        LayerSpec::TransposeConv1d { out_channels, kernel, stride, bias } => {
            let pad = (kernel - 1) / 2;
            let (ci, li) = (in_shape.channels, in_shape.len);
            let lo = out_shape.len;
            let mut out = vec![T::zero(); out_channels * lo];
            for o in 0..out_channels {
                let out_row = &mut out[o * lo..(o + 1) * lo];
                if bias {
                    out_row.iter_mut().for_each(|v| *v = params.bias[o]);
                }
                for i in 0..ci {
                    let w = &params.weights
                        [(i * out_channels + o) * kernel..(i * out_channels + o + 1) * kernel];
                    let x = &input[i * li..(i + 1) * li];
                    // Output index y = ti * stride + t - pad; iterate per tap
                    // over the contributing input range.
                    for (t, &wt) in w.iter().enumerate() {
                        let (ti_min, ti_max) = tap_range(t, pad, stride, lo, li);
                        if ti_min > ti_max {
                            continue;
                        }
                        let y_off = ti_min * stride + t - pad;
                        if stride == 1 {
                            for (&xv, oy) in
                                x[ti_min..=ti_max].iter().zip(&mut out_row[y_off..])
                            {
                                *oy = *oy + wt * xv;
                            }
                        } else {
                            for (k, &xv) in x[ti_min..=ti_max].iter().enumerate() {
                                out_row[y_off + k * stride] =
                                    out_row[y_off + k * stride] + wt * xv;
                            }
                        }
                    }
                }
            }
            out
        }
        LayerSpec::Reshape { .. } => input.to_vec(),
    }
}

#[allow(clippy::too_many_arguments)]
fn layer_backward<T: Scalar>(
    layer: &LayerSpec,
    params: &LayerParams<T>,
    input: &[T],
    in_shape: Shape,
    out_shape: Shape,
    grad_out: &[T],
    grads: &mut LayerParams<T>,
) -> Vec<T> {
    match *layer {
        LayerSpec::Conv1d { out_channels, kernel, stride, bias } => {
            let pad = (kernel - 1) / 2;
            let (ci, li) = (in_shape.channels, in_shape.len);
            let lo = out_shape.len;
            let mut grad_in = vec![T::zero(); ci * li];
            for o in 0..out_channels {
                let g_row = &grad_out[o * lo..(o + 1) * lo];
                if bias {
                    grads.bias[o] = grads.bias[o] + g_row.iter().copied().sum();
                }
                for i in 0..ci {
                    let w_base = (o * ci + i) * kernel;
                    let x = &input[i * li..(i + 1) * li];
                    let gi = &mut grad_in[i * li..(i + 1) * li];
                    for t in 0..kernel {
                        let (y_min, y_max) = tap_range(t, pad, stride, li, lo);
                        if y_min > y_max {
                            continue;
                        }
                        let x_off = y_min * stride + t - pad;
                        let wt = params.weights[w_base + t];
                        let mut gw = T::zero();
                        if stride == 1 {
                            for ((&g, &xv), giv) in g_row[y_min..=y_max]
                                .iter()
                                .zip(&x[x_off..])
                                .zip(&mut gi[x_off..])
                            {
                                gw = gw + g * xv;
                                *giv = *giv + g * wt;
                            }
                        } else {
                            for (k, &g) in g_row[y_min..=y_max].iter().enumerate() {
                                let xi = x_off + k * stride;
                                gw = gw + g * x[xi];
                                gi[xi] = gi[xi] + g * wt;
                            }
                        }
                        grads.weights[w_base + t] = grads.weights[w_base + t] + gw;
                    }
                }
            }
            grad_in
        }
        LayerSpec::LeakyRelu { slope } => {
            let s = T::from_f64(slope);
            input
                .iter()
                .zip(grad_out)
                .map(|(&x, &g)| if x > T::zero() { g } else { g * s })
                .collect()
        }
        LayerSpec::MaxPool1d { width } => {
            let (c, lo) = (out_shape.channels, out_shape.len);
            let li = in_shape.len;
            let mut grad_in = vec![T::zero(); c * li];
            for ch in 0..c {
                for y in 0..lo {
                    let base = ch * li + y * width;
                    let mut arg = 0;
                    for t in 1..width {
                        if input[base + t] > input[base + arg] {
                            arg = t;
                        }
                    }
                    grad_in[base + arg] = grad_out[ch * lo + y];
                }
            }
            grad_in
        }
        LayerSpec::Dense { out_dim, bias } => {
            let flat = in_shape.flat();
            let mut grad_in = vec![T::zero(); flat];
            for (o, &g) in grad_out.iter().enumerate().take(out_dim) {
                if bias {
                    grads.bias[o] = grads.bias[o] + g;
                }
                let w_row = &params.weights[o * flat..(o + 1) * flat];
                let gw_row = &mut grads.weights[o * flat..(o + 1) * flat];
                for (gw, &x) in gw_row.iter_mut().zip(input) {
                    *gw = *gw + g * x;
                }
                for (gi, &w) in grad_in.iter_mut().zip(w_row) {
                    *gi = *gi + g * w;
                }
            }
            grad_in
        }
        LayerSpec::Upsample1d { factor } => {
            let (c, lo) = (out_shape.channels, out_shape.len);
            let li = in_shape.len;
            let mut grad_in = vec![T::zero(); c * li];
            for ch in 0..c {
                for y in 0..lo {
                    grad_in[ch * li + y / factor] =
                        grad_in[ch * li + y / factor] + grad_out[ch * lo + y];
                }
            }
            grad_in
        }
        LayerSpec::TransposeConv1d { out_channels, kernel, stride, bias } => {
            let pad = (kernel - 1) / 2;
            let (ci, li) = (in_shape.channels, in_shape.len);
            let lo = out_shape.len;
            let mut grad_in = vec![T::zero(); ci * li];
            for o in 0..out_channels {
                let g_row = &grad_out[o * lo..(o + 1) * lo];
                if bias {
                    grads.bias[o] = grads.bias[o] + g_row.iter().copied().sum();
                }
                for i in 0..ci {
                    let w_base = (i * out_channels + o) * kernel;
                    let x = &input[i * li..(i + 1) * li];
                    let gi = &mut grad_in[i * li..(i + 1) * li];
                    for t in 0..kernel {
                        let (ti_min, ti_max) = tap_range(t, pad, stride, lo, li);
                        if ti_min > ti_max {
                            continue;
                        }
                        let y_off = ti_min * stride + t - pad;
                        let wt = params.weights[w_base + t];
                        let mut gw = T::zero();
                        if stride == 1 {
                            for ((&xv, giv), &g) in x[ti_min..=ti_max]
                                .iter()
                                .zip(&mut gi[ti_min..=ti_max])
                                .zip(&g_row[y_off..])
                            {
                                gw = gw + g * xv;
                                *giv = *giv + g * wt;
                            }
                        } else {
                            for (k, &xv) in x[ti_min..=ti_max].iter().enumerate() {
                                let g = g_row[y_off + k * stride];
                                gw = gw + g * xv;
                                gi[ti_min + k] = gi[ti_min + k] + g * wt;
                            }
                        }
                        grads.weights[w_base + t] = grads.weights[w_base + t] + gw;
                    }
                }
            }
            grad_in
        }
        LayerSpec::Reshape { .. } => grad_out.to_vec(),
    }
}

fn check_input<T: Scalar>(spec: &NetSpec, params: &NetParams<T>, x: &[T]) -> Result<Vec<Shape>> {
    let shapes = spec.shapes()?;
    if params.layers.len() != spec.layers.len() {
        return Err(Error::Shape(format!(
            "parameter set has {} layers, spec has {}",
            params.layers.len(),
            spec.layers.len()
        )));
    }
    if x.len() != shapes[0].flat() {
        return Err(Error::DimMismatch { expected: shapes[0].flat(), found: x.len() });
    }
    Ok(shapes)
}

/// Runs one sample through the network.
pub fn forward_sample<T: Scalar>(
    spec: &NetSpec,
    params: &NetParams<T>,
    x: &[T],
) -> Result<Vec<T>> {
    let shapes = check_input(spec, params, x)?;
    let mut current = x.to_vec();
    for (idx, layer) in spec.layers.iter().enumerate() {
        current = layer_forward(layer, &params.layers[idx], &current, shapes[idx], shapes[idx + 1]);
    }
    Ok(current)
}

/// Forward pass keeping every intermediate activation (index 0 = input).
pub fn forward_cached<T: Scalar>(
    spec: &NetSpec,
    params: &NetParams<T>,
    x: &[T],
) -> Result<Vec<Vec<T>>> {
    let shapes = check_input(spec, params, x)?;
    let mut acts = Vec::with_capacity(spec.layers.len() + 1);
    acts.push(x.to_vec());
    for (idx, layer) in spec.layers.iter().enumerate() {
        let next = layer_forward(
            layer,
            &params.layers[idx],
            acts.last().expect("non-empty"),
            shapes[idx],
            shapes[idx + 1],
        );
        acts.push(next);
    }
    Ok(acts)
}

/// Accumulates parameter gradients for one sample whose activations were
/// produced by [`forward_cached`]; returns the gradient wrt the input.
pub fn backward_sample<T: Scalar>(
    spec: &NetSpec,
    params: &NetParams<T>,
    acts: &[Vec<T>],
    out_grad: &[T],
    grads: &mut NetParams<T>,
) -> Result<Vec<T>> {
    let shapes = spec.shapes()?;
    let mut grad = out_grad.to_vec();
    for idx in (0..spec.layers.len()).rev() {
        grad = layer_backward(
            &spec.layers[idx],
            &params.layers[idx],
            &acts[idx],
            shapes[idx],
            shapes[idx + 1],
            &grad,
            &mut grads.layers[idx],
        );
    }
    Ok(grad)
}

/// Batch forward: each row of `batch` is one flattened sample.
pub fn forward_batch<T: Scalar>(
    spec: &NetSpec,
    params: &NetParams<T>,
    batch: &[Vec<T>],
) -> Result<Vec<Vec<T>>> {
    batch.iter().map(|x| forward_sample(spec, params, x)).collect()
}

/// Batch reverse pass: sums per-sample parameter gradients.
pub fn backward_batch<T: Scalar>(
    spec: &NetSpec,
    params: &NetParams<T>,
    batch: &[Vec<T>],
    out_grads: &[Vec<T>],
) -> Result<NetParams<T>> {
    if batch.len() != out_grads.len() {
        return Err(Error::Shape(format!(
            "batch has {} samples but {} output gradients",
            batch.len(),
            out_grads.len()
        )));
    }
    let mut grads = params.zeros_like();
    for (x, g) in batch.iter().zip(out_grads) {
        let acts = forward_cached(spec, params, x)?;
        backward_sample(spec, params, &acts, g, &mut grads)?;
    }
    Ok(grads)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::RngStream;
    use rand::Rng;

    fn stream(i: u64) -> RngStream {
        RngStream::from_root(77).fork("engine.test", i)
    }

    fn random_batch(spec: &NetSpec, n: usize, key: u64) -> Vec<Vec<f64>> {
        let mut rng = stream(key).rng();
        (0..n)
            .map(|_| (0..spec.input_shape().flat()).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect()
    }

    /// Loss = sum over samples of a fixed linear functional of the output.
    fn linear_loss(
        spec: &NetSpec,
        params: &NetParams<f64>,
        batch: &[Vec<f64>],
        coefs: &[f64],
    ) -> f64 {
        forward_batch(spec, params, batch)
            .unwrap()
            .iter()
            .map(|out| out.iter().zip(coefs).map(|(o, c)| o * c).sum::<f64>())
            .sum()
    }

    fn finite_difference_check(spec: &NetSpec, batch_size: usize, key: u64) {
        let params: NetParams<f64> = NetParams::init(spec, &stream(key)).unwrap();
        let batch = random_batch(spec, batch_size, key + 1);
        let out_dim = spec.output_shape().unwrap().flat();
        let mut rng = stream(key + 2).rng();
        let coefs: Vec<f64> = (0..out_dim).map(|_| rng.random_range(-1.0..1.0)).collect();

        let out_grads: Vec<Vec<f64>> = vec![coefs.clone(); batch.len()];
        let analytic = backward_batch(spec, &params, &batch, &out_grads).unwrap();

        let eps = 1e-5;
        for l in 0..params.layers.len() {
            let n_w = params.layers[l].weights.len();
            let n_b = params.layers[l].bias.len();
            for idx in 0..n_w + n_b {
                let mut plus = params.clone();
                let mut minus = params.clone();
                let (slot_p, slot_m, a) = if idx < n_w {
                    (
                        &mut plus.layers[l].weights[idx],
                        &mut minus.layers[l].weights[idx],
                        analytic.layers[l].weights[idx],
                    )
                } else {
                    (
                        &mut plus.layers[l].bias[idx - n_w],
                        &mut minus.layers[l].bias[idx - n_w],
                        analytic.layers[l].bias[idx - n_w],
                    )
                };
                *slot_p += eps;
                *slot_m -= eps;
                let fd = (linear_loss(spec, &plus, &batch, &coefs)
                    - linear_loss(spec, &minus, &batch, &coefs))
                    / (2.0 * eps);
                let denom = a.abs().max(fd.abs()).max(1e-6);
                assert!(
                    (a - fd).abs() / denom < 1e-4,
                    "layer {l} param {idx}: analytic {a} vs fd {fd}"
                );
            }
        }
    }

    #[test]
    fn leaky_relu_worked_example() {
        let spec = NetSpec {
            input_channels: 1,
            input_len: 2,
            layers: vec![LayerSpec::LeakyRelu { slope: 0.01 }],
        };
        let params: NetParams<f64> = NetParams::init(&spec, &stream(0)).unwrap();
        let out = forward_sample(&spec, &params, &[-1.0, 2.0]).unwrap();
        assert_eq!(out, vec![-0.01, 2.0]);
    }

    #[test]
    fn zero_input_through_biasfree_net_is_zero() {
        let spec = NetSpec {
            input_channels: 1,
            input_len: 8,
            layers: vec![
                LayerSpec::Conv1d { out_channels: 3, kernel: 3, stride: 1, bias: false },
                LayerSpec::LeakyRelu { slope: 0.1 },
                LayerSpec::MaxPool1d { width: 2 },
                LayerSpec::Dense { out_dim: 4, bias: false },
            ],
        };
        let params: NetParams<f64> = NetParams::init(&spec, &stream(1)).unwrap();
        let out = forward_sample(&spec, &params, &[0.0; 8]).unwrap();
        assert!(out.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn batch_equals_concatenated_singles() {
        let spec = NetSpec {
            input_channels: 1,
            input_len: 12,
            layers: vec![
                LayerSpec::Conv1d { out_channels: 2, kernel: 5, stride: 1, bias: true },
                LayerSpec::LeakyRelu { slope: 0.1 },
                LayerSpec::MaxPool1d { width: 2 },
                LayerSpec::Dense { out_dim: 3, bias: true },
            ],
        };
        let params: NetParams<f64> = NetParams::init(&spec, &stream(2)).unwrap();
        let batch = random_batch(&spec, 2, 3);
        let joint = forward_batch(&spec, &params, &batch).unwrap();
        for (i, x) in batch.iter().enumerate() {
            let single = forward_sample(&spec, &params, x).unwrap();
            for (a, b) in joint[i].iter().zip(&single) {
                assert!((a - b).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn forward_is_deterministic() {
        let spec = NetSpec {
            input_channels: 1,
            input_len: 10,
            layers: vec![LayerSpec::Conv1d { out_channels: 2, kernel: 3, stride: 1, bias: true }],
        };
        let params: NetParams<f64> = NetParams::init(&spec, &stream(4)).unwrap();
        let x = random_batch(&spec, 1, 5).remove(0);
        assert_eq!(
            forward_sample(&spec, &params, &x).unwrap(),
            forward_sample(&spec, &params, &x).unwrap()
        );
    }

    #[test]
    fn zero_output_gradient_gives_zero_parameter_gradients() {
        let spec = NetSpec {
            input_channels: 1,
            input_len: 6,
            layers: vec![LayerSpec::Dense { out_dim: 2, bias: true }],
        };
        let params: NetParams<f64> = NetParams::init(&spec, &stream(6)).unwrap();
        let batch = random_batch(&spec, 2, 7);
        let grads = backward_batch(&spec, &params, &batch, &vec![vec![0.0, 0.0]; 2]).unwrap();
        assert!(grads.layers[0].weights.iter().all(|&g| g == 0.0));
        assert!(grads.layers[0].bias.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn gradients_conv() {
        let spec = NetSpec {
            input_channels: 2,
            input_len: 9,
            layers: vec![LayerSpec::Conv1d { out_channels: 3, kernel: 3, stride: 1, bias: true }],
        };
        finite_difference_check(&spec, 3, 10);
    }

    #[test]
    fn gradients_conv_strided() {
        let spec = NetSpec {
            input_channels: 1,
            input_len: 9,
            layers: vec![LayerSpec::Conv1d { out_channels: 2, kernel: 3, stride: 2, bias: true }],
        };
        finite_difference_check(&spec, 2, 11);
    }

    #[test]
    fn gradients_transpose_conv() {
        let spec = NetSpec {
            input_channels: 2,
            input_len: 7,
            layers: vec![LayerSpec::TransposeConv1d {
                out_channels: 3,
                kernel: 5,
                stride: 1,
                bias: true,
            }],
        };
        finite_difference_check(&spec, 3, 12);
    }

    #[test]
    fn gradients_dense() {
        let spec = NetSpec {
            input_channels: 1,
            input_len: 6,
            layers: vec![LayerSpec::Dense { out_dim: 4, bias: true }],
        };
        finite_difference_check(&spec, 3, 13);
    }

    #[test]
    fn gradients_through_relu_pool_upsample_reshape() {
        let spec = NetSpec {
            input_channels: 1,
            input_len: 8,
            layers: vec![
                LayerSpec::Dense { out_dim: 8, bias: true },
                LayerSpec::Reshape { channels: 2 },
                LayerSpec::LeakyRelu { slope: 0.1 },
                LayerSpec::MaxPool1d { width: 2 },
                LayerSpec::Upsample1d { factor: 3 },
                LayerSpec::Dense { out_dim: 3, bias: false },
            ],
        };
        finite_difference_check(&spec, 3, 14);
    }

    #[test]
    fn input_gradient_matches_finite_differences() {
        let spec = NetSpec {
            input_channels: 1,
            input_len: 8,
            layers: vec![
                LayerSpec::Conv1d { out_channels: 2, kernel: 3, stride: 1, bias: true },
                LayerSpec::LeakyRelu { slope: 0.1 },
                LayerSpec::Dense { out_dim: 2, bias: true },
            ],
        };
        let params: NetParams<f64> = NetParams::init(&spec, &stream(15)).unwrap();
        let x = random_batch(&spec, 1, 16).remove(0);
        let coefs = vec![0.7, -1.3];
        let acts = forward_cached(&spec, &params, &x).unwrap();
        let mut sink = params.zeros_like();
        let grad_in = backward_sample(&spec, &params, &acts, &coefs, &mut sink).unwrap();
        let eps = 1e-5;
        for i in 0..x.len() {
            let mut plus = x.clone();
            let mut minus = x.clone();
            plus[i] += eps;
            minus[i] -= eps;
            let f = |v: &Vec<f64>| -> f64 {
                forward_sample(&spec, &params, v)
                    .unwrap()
                    .iter()
                    .zip(&coefs)
                    .map(|(o, c)| o * c)
                    .sum()
            };
            let fd = (f(&plus) - f(&minus)) / (2.0 * eps);
            let denom = grad_in[i].abs().max(fd.abs()).max(1e-6);
            assert!((grad_in[i] - fd).abs() / denom < 1e-4, "input {i}");
        }
    }

    #[test]
    fn kernel_wider_than_padded_input_still_works() {
        // A k=5 conv on a length-1 map leaves a single mostly-padded tap
        // window; gradients must still match finite differences.
        let spec = NetSpec {
            input_channels: 1,
            input_len: 4,
            layers: vec![
                LayerSpec::Dense { out_dim: 2, bias: true },
                LayerSpec::Reshape { channels: 2 },
                LayerSpec::Conv1d { out_channels: 2, kernel: 5, stride: 1, bias: true },
            ],
        };
        finite_difference_check(&spec, 2, 18);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let spec = NetSpec {
            input_channels: 1,
            input_len: 4,
            layers: vec![LayerSpec::Dense { out_dim: 2, bias: false }],
        };
        let params: NetParams<f64> = NetParams::init(&spec, &stream(17)).unwrap();
        assert!(matches!(
            forward_sample(&spec, &params, &[0.0; 3]),
            Err(Error::DimMismatch { expected: 4, found: 3 })
        ));
    }
}
