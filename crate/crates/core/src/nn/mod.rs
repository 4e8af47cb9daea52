//! Minimal dense network core.
//!
//! Hidden layers apply the configured activation; the output layer is linear
//! and produces logits. Everything is `f64` and single-threaded so that runs
//! are bit-reproducible for a fixed seed.

mod adam;
mod loss;
mod matrix;
mod mlp;

pub use adam::{adam_step, AdamState};
pub use loss::{cross_entropy, focal_loss, softmax, softmax_rows, BaseLoss, PROB_FLOOR};
pub use matrix::Matrix;
pub use mlp::{backward, forward, init_model, Activation, ForwardCache, Gradients, MlpModel};
