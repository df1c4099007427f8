//! rmsprop parameter updates.

use serde::{Deserialize, Serialize};

use super::tensor::Tensor;

/// rmsprop hyper-parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RmsPropConfig {
    pub learning_rate: f64,
    pub rho: f64,
    pub epsilon: f64,
}

impl Default for RmsPropConfig {
    fn default() -> Self {
        RmsPropConfig {
            learning_rate: 0.001,
            rho: 0.9,
            epsilon: 1e-7,
        }
    }
}

/// Running mean of squared gradients, one slot per parameter tensor.
#[derive(Debug, Clone, Default)]
pub struct RmsPropState {
    pub slots: Vec<Tensor>,
}

impl RmsPropState {
    /// Zero state shaped like the given parameter tensors.
    pub fn zeros_like(tensors: &[Tensor]) -> RmsPropState {
        RmsPropState {
            slots: tensors.iter().map(Tensor::zeros_like).collect(),
        }
    }
}

/// One element-wise rmsprop step over a single parameter slice:
/// `v <- rho*v + (1-rho)*g^2; p <- p - lr*g/(sqrt(v) + eps)`.
pub fn rmsprop_step(param: &mut [f64], grad: &[f64], state: &mut [f64], cfg: &RmsPropConfig) {
    debug_assert_eq!(param.len(), grad.len());
    debug_assert_eq!(param.len(), state.len());
    for i in 0..param.len() {
        let g = grad[i];
        state[i] = cfg.rho * state[i] + (1.0 - cfg.rho) * g * g;
        param[i] -= cfg.learning_rate * g / (state[i].sqrt() + cfg.epsilon);
    }
}
