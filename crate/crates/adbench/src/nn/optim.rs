//! Stochastic optimizers.
//!
//! The default is Adam with decoupled weight decay: the decay term
//! `lambda * W` (the gradient of the Frobenius regularizer) bypasses the
//! moment estimates and is applied directly to the weights, never to
//! biases. A plain-SGD mode is kept for hand-checkable updates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::{NetParams, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    Adam,
    Sgd,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub kind: OptimizerKind,
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            kind: OptimizerKind::Adam,
            learning_rate: 1e-3,
            weight_decay: 1e-6,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Per-parameter moment accumulators plus the step counter.
#[derive(Clone, Debug)]
pub struct OptimizerState<T> {
    config: OptimizerConfig,
    step_count: u64,
    m: NetParams<T>,
    v: NetParams<T>,
}

impl<T: Scalar> OptimizerState<T> {
    pub fn new(config: OptimizerConfig, params: &NetParams<T>) -> Self {
        Self { config, step_count: 0, m: params.zeros_like(), v: params.zeros_like() }
    }

    pub fn config(&self) -> &OptimizerConfig {
        &self.config
    }

    /// Applies one update. `grads` must hold the data-term gradients; the
    /// weight-decay contribution is added here. Errors out if any
    /// parameter turns non-finite.
    pub fn step(&mut self, params: &mut NetParams<T>, grads: &NetParams<T>) -> Result<()> {
        self.step_count += 1;
        let lr = self.config.learning_rate;
        let wd = self.config.weight_decay;
        match self.config.kind {
            OptimizerKind::Sgd => {
                for (l, (p, g)) in params.layers.iter_mut().zip(&grads.layers).enumerate() {
                    let _ = l;
                    for (w, gw) in p.weights.iter_mut().zip(&g.weights) {
                        let update = gw.into_f64() + wd * w.into_f64();
                        *w = T::from_f64(w.into_f64() - lr * update);
                    }
                    for (b, gb) in p.bias.iter_mut().zip(&g.bias) {
                        *b = T::from_f64(b.into_f64() - lr * gb.into_f64());
                    }
                }
            }
            OptimizerKind::Adam => {
                let (b1, b2, eps) = (self.config.beta1, self.config.beta2, self.config.epsilon);
                let bc1 = 1.0 - b1.powi(self.step_count as i32);
                let bc2 = 1.0 - b2.powi(self.step_count as i32);
                for (l, (p, g)) in params.layers.iter_mut().zip(&grads.layers).enumerate() {
                    let m = &mut self.m.layers[l];
                    let v = &mut self.v.layers[l];
                    for i in 0..p.weights.len() {
                        let gw = g.weights[i].into_f64();
                        let mi = b1 * m.weights[i].into_f64() + (1.0 - b1) * gw;
                        let vi = b2 * v.weights[i].into_f64() + (1.0 - b2) * gw * gw;
                        m.weights[i] = T::from_f64(mi);
                        v.weights[i] = T::from_f64(vi);
                        let update = (mi / bc1) / ((vi / bc2).sqrt() + eps);
                        let w = p.weights[i].into_f64();
                        p.weights[i] = T::from_f64(w - lr * update - lr * wd * w);
                    }
                    for i in 0..p.bias.len() {
                        let gb = g.bias[i].into_f64();
                        let mi = b1 * m.bias[i].into_f64() + (1.0 - b1) * gb;
                        let vi = b2 * v.bias[i].into_f64() + (1.0 - b2) * gb * gb;
                        m.bias[i] = T::from_f64(mi);
                        v.bias[i] = T::from_f64(vi);
                        let update = (mi / bc1) / ((vi / bc2).sqrt() + eps);
                        p.bias[i] = T::from_f64(p.bias[i].into_f64() - lr * update);
                    }
                }
            }
        }
        if !params.all_finite() {
            return Err(Error::NonFinite {
                context: format!("optimizer step {}", self.step_count),
            });
        }
        Ok(())
    }
}
