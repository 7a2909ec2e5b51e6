//! Bias-corrected Adam update over a list of parameter tensors.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Learning rate used by the training recipe.
pub const PAPER_LR: f64 = 0.0003;
/// Canonical Adam defaults; only the learning rate is configurable per run.
pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPS: f64 = 1e-8;

/// First/second moment buffers plus hyperparameters. One state drives all
/// parameter tensors of a model; `step` increments once per update.
#[derive(Debug, Clone)]
pub struct AdamState<T> {
    pub lr: T,
    pub beta1: T,
    pub beta2: T,
    pub eps: T,
    pub step: u64,
    m: Vec<Vec<T>>,
    v: Vec<Vec<T>>,
}

impl<T: Scalar> AdamState<T> {
    /// Zero-moment state for parameter tensors of the given flat lengths.
    pub fn new(lr: T, param_lens: &[usize]) -> Self {
        AdamState {
            lr,
            beta1: T::from_f64_lossy(ADAM_BETA1),
            beta2: T::from_f64_lossy(ADAM_BETA2),
            eps: T::from_f64_lossy(ADAM_EPS),
            step: 0,
            m: param_lens.iter().map(|&n| vec![T::zero(); n]).collect(),
            v: param_lens.iter().map(|&n| vec![T::zero(); n]).collect(),
        }
    }
}

/// One Adam step over paired (parameter, gradient) slices.
///
/// Errors when slice counts or lengths disagree with the state, or when a
/// gradient contains NaN.
pub fn adam_step<T: Scalar>(
    state: &mut AdamState<T>,
    params: &mut [&mut [T]],
    grads: &[&[T]],
) -> Result<()> {
    if params.len() != state.m.len() || grads.len() != state.m.len() {
        return Err(Error::shape(
            format!("{} parameter tensors", state.m.len()),
            format!("{} params / {} grads", params.len(), grads.len()),
        ));
    }
    for ((p, g), m) in params.iter().zip(grads).zip(&state.m) {
        if p.len() != m.len() || g.len() != m.len() {
            return Err(Error::shape(
                format!("{} values", m.len()),
                format!("{} params / {} grads", p.len(), g.len()),
            ));
        }
        if g.iter().any(|v| v.is_nan()) {
            return Err(Error::NonFinite("adam gradient".into()));
        }
    }

    state.step += 1;
    let t = state.step as i32;
    let one = T::one();
    let corr1 = one - state.beta1.powi(t);
    let corr2 = one - state.beta2.powi(t);

    for (k, (p, g)) in params.iter_mut().zip(grads).enumerate() {
        let m = &mut state.m[k];
        let v = &mut state.v[k];
        for i in 0..p.len() {
            let gi = g[i];
            m[i] = state.beta1 * m[i] + (one - state.beta1) * gi;
            v[i] = state.beta2 * v[i] + (one - state.beta2) * gi * gi;
            let m_hat = m[i] / corr1;
            let v_hat = v[i] / corr2;
            p[i] -= state.lr * m_hat / (v_hat.sqrt() + state.eps);
        }
    }
    Ok(())
}
