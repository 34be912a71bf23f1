//! Binary cross-entropy and the Adam optimizer.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Probabilities are clipped to `[PROB_CLIP, 1 - PROB_CLIP]` before the log.
pub const PROB_CLIP: f64 = 1e-7;

/// Loss and dL/dp for one prediction. The gradient is evaluated at the
/// clipped probability.
pub fn bce_loss<T: Scalar>(p: T, y: u8) -> Result<(T, T)> {
    if y > 1 {
        return Err(Error::argument(format!("label must be 0 or 1, got {y}")));
    }
    let lo = T::of(PROB_CLIP);
    let hi = T::one() - lo;
    let p = p.max(lo).min(hi);
    let one = T::one();
    Ok(if y == 1 {
        (-p.ln(), -one / p)
    } else {
        (-(one - p).ln(), one / (one - p))
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            batch_size: 4,
            epochs: 20,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.learning_rate.is_nan() || self.learning_rate <= 0.0 {
            return Err(Error::argument("learning_rate must be positive"));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return Err(Error::argument("beta1 and beta2 must lie in [0, 1)"));
        }
        if self.epsilon.is_nan() || self.epsilon < 0.0 {
            return Err(Error::argument("epsilon must be non-negative"));
        }
        if self.batch_size == 0 {
            return Err(Error::argument("batch_size must be at least 1"));
        }
        Ok(())
    }
}

/// First and second moment estimates, laid out like the flat parameter vector.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState<T> {
    pub m: Vec<T>,
    pub v: Vec<T>,
    pub t: u64,
}

impl<T: Scalar> AdamState<T> {
    pub fn new(len: usize) -> Self {
        Self {
            m: vec![T::zero(); len],
            v: vec![T::zero(); len],
            t: 0,
        }
    }
}

/// One bias-corrected Adam update of `params` in place.
pub fn adam_step<T: Scalar>(params: &mut [T], grads: &[T], state: &mut AdamState<T>, cfg: &TrainConfig) -> Result<()> {
    let n = params.len();
    if grads.len() != n || state.m.len() != n || state.v.len() != n {
        return Err(Error::Shape {
            op: "adam_step",
            left: (n, grads.len()),
            right: (state.m.len(), state.v.len()),
        });
    }
    state.t += 1;
    let t = i32::try_from(state.t).unwrap_or(i32::MAX);
    let b1 = T::of(cfg.beta1);
    let b2 = T::of(cfg.beta2);
    let one = T::one();
    let correct1 = one - b1.powi(t);
    let correct2 = one - b2.powi(t);
    let lr = T::of(cfg.learning_rate);
    let eps = T::of(cfg.epsilon);
    for i in 0..n {
        let g = grads[i];
        state.m[i] = b1 * state.m[i] + (one - b1) * g;
        state.v[i] = b2 * state.v[i] + (one - b2) * g * g;
        let m_hat = state.m[i] / correct1;
        let v_hat = state.v[i] / correct2;
        params[i] -= lr * m_hat / (v_hat.sqrt() + eps);
    }
    Ok(())
}
