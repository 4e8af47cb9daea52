use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::nn::{BaseLoss, Matrix};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Tanh,
}

impl Activation {
    #[inline]
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Tanh => z.tanh(),
        }
    }

    /// Derivative expressed through the pre-activation `z` and output `a`.
    #[inline]
    fn derivative(self, z: f64, a: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - a * a,
        }
    }
}

/// Dense feed-forward classifier.
///
/// Layer `l` maps `layer_sizes[l]` inputs to `layer_sizes[l + 1]` outputs with
/// weights stored as an `(out, in)` row-major matrix. The last layer has no
/// activation and emits logits.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    layer_sizes: Vec<usize>,
    weights: Vec<Matrix>,
    biases: Vec<Vec<f64>>,
    activation: Activation,
}

impl MlpModel {
    /// Builds a model from explicit parameters.
    pub fn from_parts(weights: Vec<Matrix>, biases: Vec<Vec<f64>>, activation: Activation) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidArgument("model needs at least one layer".into()));
        }
        if weights.len() != biases.len() {
            return Err(Error::Shape(format!(
                "{} weight matrices but {} bias vectors",
                weights.len(),
                biases.len()
            )));
        }
        let mut layer_sizes = vec![weights[0].cols()];
        for (l, (w, b)) in weights.iter().zip(&biases).enumerate() {
            if w.cols() != *layer_sizes.last().unwrap() {
                return Err(Error::Shape(format!(
                    "layer {l} expects {} inputs but previous layer emits {}",
                    w.cols(),
                    layer_sizes.last().unwrap()
                )));
            }
            if b.len() != w.rows() {
                return Err(Error::Shape(format!(
                    "layer {l} has {} outputs but {} biases",
                    w.rows(),
                    b.len()
                )));
            }
            layer_sizes.push(w.rows());
        }
        if *layer_sizes.last().unwrap() < 2 {
            return Err(Error::InvalidArgument("output layer needs at least 2 classes".into()));
        }
        Ok(Self {
            layer_sizes,
            weights,
            biases,
            activation,
        })
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn input_dim(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn class_count(&self) -> usize {
        *self.layer_sizes.last().unwrap()
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn weights(&self) -> &[Matrix] {
        &self.weights
    }

    pub fn biases(&self) -> &[Vec<f64>] {
        &self.biases
    }

    pub fn param_count(&self) -> usize {
        self.weights
            .iter()
            .zip(&self.biases)
            .map(|(w, b)| w.as_slice().len() + b.len())
            .sum()
    }

    /// All parameters, layer by layer, weights before biases.
    pub fn params(&self) -> impl Iterator<Item = &f64> {
        self.weights
            .iter()
            .zip(&self.biases)
            .flat_map(|(w, b)| w.as_slice().iter().chain(b.iter()))
    }

    /// Same order as [`MlpModel::params`].
    pub fn params_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.weights
            .iter_mut()
            .zip(self.biases.iter_mut())
            .flat_map(|(w, b)| w.as_mut_slice().iter_mut().chain(b.iter_mut()))
    }
}

/// Glorot-uniform weights, zero biases. `layer_sizes` is `[input, hidden..., classes]`.
pub fn init_model(seed: u64, layer_sizes: &[usize], activation: Activation) -> Result<MlpModel> {
    if layer_sizes.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "need an input width and at least one layer, got sizes {layer_sizes:?}"
        )));
    }
    if layer_sizes.contains(&0) {
        return Err(Error::InvalidArgument(format!(
            "layer widths must be positive, got {layer_sizes:?}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights = Vec::with_capacity(layer_sizes.len() - 1);
    let mut biases = Vec::with_capacity(layer_sizes.len() - 1);
    for pair in layer_sizes.windows(2) {
        let (fan_in, fan_out) = (pair[0], pair[1]);
        let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
        let dist = Uniform::new_inclusive(-bound, bound).expect("finite positive bound");
        let data = (0..fan_in * fan_out).map(|_| dist.sample(&mut rng)).collect();
        weights.push(Matrix::from_vec(fan_out, fan_in, data)?);
        biases.push(vec![0.0; fan_out]);
    }
    MlpModel::from_parts(weights, biases, activation)
}

/// Intermediate values of one forward pass, consumed by [`backward`].
#[derive(Debug, Clone)]
pub struct ForwardCache {
    /// `activations[0]` is the input batch; `activations[l + 1]` is the output
    /// of layer `l` (logits for the last layer).
    pub activations: Vec<Matrix>,
    /// Pre-activation values of every layer.
    pub pre_activations: Vec<Matrix>,
}

pub fn forward(model: &MlpModel, batch: &Matrix) -> Result<(Matrix, ForwardCache)> {
    if batch.cols() != model.input_dim() {
        return Err(Error::Shape(format!(
            "batch has {} features, model expects {}",
            batch.cols(),
            model.input_dim()
        )));
    }
    let n_layers = model.weights.len();
    let mut activations = Vec::with_capacity(n_layers + 1);
    let mut pre_activations = Vec::with_capacity(n_layers);
    activations.push(batch.clone());
    for (l, (w, b)) in model.weights.iter().zip(&model.biases).enumerate() {
        let input = activations.last().unwrap();
        let mut z = Matrix::zeros(input.rows(), w.rows());
        for r in 0..input.rows() {
            let x = input.row(r);
            for (o, out) in z.row_mut(r).iter_mut().enumerate() {
                let dot: f64 = w.row(o).iter().zip(x).map(|(a, b)| a * b).sum();
                *out = dot + b[o];
            }
        }
        let a = if l + 1 < n_layers {
            let mut a = z.clone();
            a.as_mut_slice()
                .iter_mut()
                .for_each(|v| *v = model.activation.apply(*v));
            a
        } else {
            z.clone()
        };
        pre_activations.push(z);
        activations.push(a);
    }
    let logits = activations.last().unwrap().clone();
    Ok((
        logits,
        ForwardCache {
            activations,
            pre_activations,
        },
    ))
}

/// Parameter gradients, shaped like the model.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Matrix>,
    pub biases: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn zeros_like(model: &MlpModel) -> Self {
        Self {
            weights: model
                .weights
                .iter()
                .map(|w| Matrix::zeros(w.rows(), w.cols()))
                .collect(),
            biases: model.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        }
    }

    /// Same order as [`MlpModel::params`].
    pub fn iter(&self) -> impl Iterator<Item = &f64> {
        self.weights
            .iter()
            .zip(&self.biases)
            .flat_map(|(w, b)| w.as_slice().iter().chain(b.iter()))
    }
}

/// Gradients of `(1/B) * sum_i w_i * loss_i` with respect to every parameter.
///
/// The sample weights are constants here: nothing flows back into whatever
/// produced them.
pub fn backward(
    model: &MlpModel,
    cache: &ForwardCache,
    probs: &Matrix,
    labels: &[usize],
    sample_weights: &[f64],
    base_loss: BaseLoss,
) -> Result<Gradients> {
    let n_layers = model.weights.len();
    if cache.activations.len() != n_layers + 1 || cache.pre_activations.len() != n_layers {
        return Err(Error::Shape("forward cache does not match model depth".into()));
    }
    let batch = cache.activations[0].rows();
    if probs.rows() != batch || probs.cols() != model.class_count() {
        return Err(Error::Shape(format!(
            "probabilities are {}x{}, expected {batch}x{}",
            probs.rows(),
            probs.cols(),
            model.class_count()
        )));
    }
    if labels.len() != batch || sample_weights.len() != batch {
        return Err(Error::Shape(format!(
            "batch of {batch} with {} labels and {} weights",
            labels.len(),
            sample_weights.len()
        )));
    }
    if sample_weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::InvalidArgument("sample weights must be finite and nonnegative".into()));
    }
    if let Some(&label) = labels.iter().find(|&&y| y >= model.class_count()) {
        return Err(Error::LabelOutOfRange {
            label,
            classes: model.class_count(),
        });
    }

    let mut grads = Gradients::zeros_like(model);
    if batch == 0 {
        return Ok(grads);
    }
    let scale = 1.0 / batch as f64;

    let mut delta = Matrix::zeros(batch, model.class_count());
    for r in 0..batch {
        base_loss.logit_grad(probs.row(r), labels[r], delta.row_mut(r));
        let k = sample_weights[r] * scale;
        delta.row_mut(r).iter_mut().for_each(|v| *v *= k);
    }

    for l in (0..n_layers).rev() {
        let input = &cache.activations[l];
        let w = &model.weights[l];
        let gw = &mut grads.weights[l];
        let gb = &mut grads.biases[l];
        for r in 0..batch {
            let x = input.row(r);
            for (o, &d) in delta.row(r).iter().enumerate() {
                gb[o] += d;
                if d != 0.0 {
                    gw.row_mut(o).iter_mut().zip(x).for_each(|(g, xi)| *g += d * xi);
                }
            }
        }
        if l == 0 {
            break;
        }
        let z_prev = &cache.pre_activations[l - 1];
        let a_prev = &cache.activations[l];
        let mut next = Matrix::zeros(batch, w.cols());
        for r in 0..batch {
            let out = next.row_mut(r);
            for (o, &d) in delta.row(r).iter().enumerate() {
                if d != 0.0 {
                    out.iter_mut().zip(w.row(o)).for_each(|(v, wi)| *v += d * wi);
                }
            }
            for (i, v) in out.iter_mut().enumerate() {
                *v *= model.activation.derivative(z_prev.get(r, i), a_prev.get(r, i));
            }
        }
        delta = next;
    }
    Ok(grads)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::softmax_rows;

    fn batch(rows: usize, cols: usize, seed: u64) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dist = Uniform::new(-1.0, 1.0).unwrap();
        Matrix::from_vec(rows, cols, (0..rows * cols).map(|_| dist.sample(&mut rng)).collect()).unwrap()
    }

    #[test]
    fn init_is_deterministic_with_zero_biases_and_bounded_weights() {
        let a = init_model(3, &[5, 7, 3], Activation::Relu).unwrap();
        let b = init_model(3, &[5, 7, 3], Activation::Relu).unwrap();
        assert_eq!(a, b);
        assert!(a.biases().iter().flatten().all(|&v| v == 0.0));
        for (w, pair) in a.weights().iter().zip([[5, 7], [7, 3]]) {
            let bound = (6.0 / (pair[0] + pair[1]) as f64).sqrt();
            assert!(w.as_slice().iter().all(|v| v.abs() <= bound));
        }
        assert_ne!(a, init_model(4, &[5, 7, 3], Activation::Relu).unwrap());
    }

    #[test]
    fn init_rejects_bad_layouts() {
        assert!(init_model(0, &[], Activation::Relu).is_err());
        assert!(init_model(0, &[4], Activation::Relu).is_err());
        assert!(init_model(0, &[4, 0, 3], Activation::Relu).is_err());
        assert!(init_model(0, &[4, 1], Activation::Relu).is_err());
    }

    #[test]
    fn zero_model_gives_zero_logits() {
        let model = MlpModel::from_parts(
            vec![Matrix::zeros(4, 3), Matrix::zeros(2, 4)],
            vec![vec![0.0; 4], vec![0.0; 2]],
            Activation::Tanh,
        )
        .unwrap();
        let (logits, _) = forward(&model, &batch(5, 3, 1)).unwrap();
        assert!(logits.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn identity_layer_passes_inputs_through() {
        let mut eye = Matrix::zeros(3, 3);
        (0..3).for_each(|i| eye.set(i, i, 1.0));
        let model = MlpModel::from_parts(vec![eye], vec![vec![0.0; 3]], Activation::Relu).unwrap();
        let x = batch(4, 3, 2);
        let (logits, _) = forward(&model, &x).unwrap();
        assert_eq!(logits, x);
    }

    #[test]
    fn forward_rejects_wrong_width() {
        let model = init_model(0, &[3, 2], Activation::Relu).unwrap();
        assert!(matches!(forward(&model, &batch(2, 4, 0)), Err(Error::Shape(_))));
    }

    #[test]
    fn zero_weights_give_zero_gradients() {
        let model = init_model(1, &[3, 4, 3], Activation::Tanh).unwrap();
        let x = batch(4, 3, 9);
        let (logits, cache) = forward(&model, &x).unwrap();
        let probs = softmax_rows(&logits).unwrap();
        let g = backward(&model, &cache, &probs, &[0, 1, 2, 0], &[0.0; 4], BaseLoss::CrossEntropy).unwrap();
        assert!(g.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn backward_validates_inputs() {
        let model = init_model(1, &[3, 3], Activation::Tanh).unwrap();
        let (logits, cache) = forward(&model, &batch(2, 3, 9)).unwrap();
        let probs = softmax_rows(&logits).unwrap();
        let ce = BaseLoss::CrossEntropy;
        assert!(backward(&model, &cache, &probs, &[0], &[1.0, 1.0], ce).is_err());
        assert!(backward(&model, &cache, &probs, &[0, 1], &[1.0, -1.0], ce).is_err());
        assert!(backward(&model, &cache, &probs, &[0, 3], &[1.0, 1.0], ce).is_err());
    }
}
