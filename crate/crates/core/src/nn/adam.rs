use crate::nn::{Gradients, MlpModel};
use crate::{Error, Result};

/// Adam moments for every model parameter, flattened in
/// [`MlpModel::params`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub first_moment: Vec<f64>,
    pub second_moment: Vec<f64>,
    pub step: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamState {
    /// Zeroed moments with the usual `beta1 = 0.9`, `beta2 = 0.999`, `eps = 1e-8`.
    pub fn new(model: &MlpModel) -> Self {
        Self::with_hyperparams(model, 0.9, 0.999, 1e-8)
    }

    pub fn with_hyperparams(model: &MlpModel, beta1: f64, beta2: f64, eps: f64) -> Self {
        let n = model.param_count();
        Self {
            first_moment: vec![0.0; n],
            second_moment: vec![0.0; n],
            step: 0,
            beta1,
            beta2,
            eps,
        }
    }
}

/// One bias-corrected Adam step with decoupled weight decay
/// (`theta -= lr * wd * theta` before the moment update).
pub fn adam_step(model: &mut MlpModel, grads: &Gradients, state: &mut AdamState, lr: f64, wd: f64) -> Result<()> {
    let n = model.param_count();
    let n_grads = grads.iter().count();
    if state.first_moment.len() != n || state.second_moment.len() != n || n_grads != n {
        return Err(Error::Shape(format!(
            "model has {n} parameters, gradients {n_grads}, optimizer state {}/{}",
            state.first_moment.len(),
            state.second_moment.len()
        )));
    }
    state.step += 1;
    let t = state.step as i32;
    let (b1, b2, eps) = (state.beta1, state.beta2, state.eps);
    let c1 = 1.0 - b1.powi(t);
    let c2 = 1.0 - b2.powi(t);
    let params = model.params_mut();
    let moments = state.first_moment.iter_mut().zip(state.second_moment.iter_mut());
    for ((theta, &g), (m, v)) in params.zip(grads.iter()).zip(moments) {
        if wd != 0.0 {
            *theta -= lr * wd * *theta;
        }
        *m = b1 * *m + (1.0 - b1) * g;
        *v = b2 * *v + (1.0 - b2) * g * g;
        let m_hat = *m / c1;
        let v_hat = *v / c2;
        *theta -= lr * m_hat / (v_hat.sqrt() + eps);
    }
    Ok(())
}
