#![allow(dead_code)]

use lilaw_core::nn::{Activation, Matrix, MlpModel};
use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Straightforward triple-loop forward pass, independent of the library's.
pub fn naive_forward(model: &MlpModel, x: &Matrix) -> Vec<Vec<f64>> {
    let n_layers = model.weights().len();
    let mut rows: Vec<Vec<f64>> = (0..x.rows()).map(|r| x.row(r).to_vec()).collect();
    for l in 0..n_layers {
        let w = &model.weights()[l];
        let b = &model.biases()[l];
        rows = rows
            .iter()
            .map(|input| {
                (0..w.rows())
                    .map(|o| {
                        let mut z = b[o];
                        for i in 0..w.cols() {
                            z += w.get(o, i) * input[i];
                        }
                        if l + 1 < n_layers {
                            match model.activation() {
                                Activation::Relu => z.max(0.0),
                                Activation::Tanh => z.tanh(),
                            }
                        } else {
                            z
                        }
                    })
                    .collect()
            })
            .collect();
    }
    rows
}

pub fn naive_softmax(z: &[f64]) -> Vec<f64> {
    let m = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = z.iter().map(|v| (v - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.iter().map(|v| v / s).collect()
}

/// `(1/B) * sum_i w_i * loss_i` with focal exponent `gamma` (0 = cross-entropy).
pub fn naive_weighted_loss(model: &MlpModel, x: &Matrix, labels: &[usize], weights: &[f64], gamma: f64) -> f64 {
    let logits = naive_forward(model, x);
    let mut total = 0.0;
    for ((z, &y), &w) in logits.iter().zip(labels).zip(weights) {
        let p = naive_softmax(z)[y];
        total += w * -(1.0 - p).powf(gamma) * p.ln();
    }
    total / labels.len() as f64
}

pub fn random_matrix(rows: usize, cols: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = Uniform::new(-1.5, 1.5).unwrap();
    Matrix::from_vec(rows, cols, (0..rows * cols).map(|_| dist.sample(&mut rng)).collect()).unwrap()
}

/// `|a - b| / max(|a|, |b|)`, with the denominator floored so that
/// gradients which are numerically zero compare absolutely.
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-7)
}
