//! Adaptive sample weighting for training classifiers on noisy labels.
//!
//! Every training sample gets a weight computed from two numbers read off the
//! model's softmax output: the probability of its observed label and the top
//! probability. Three learnable scalars shape that weight:
//!
//! - `alpha` drives a sigmoid term that favours samples the model already fits,
//! - `beta` drives a reversed sigmoid that favours moderately fit samples,
//! - `delta` drives a radial-basis term that peaks where `delta * p_label == p_max`.
//!
//! The scalars are tuned on validation mini-batches by plain gradient descent
//! with closed-form gradients, interleaved with Adam steps on the network.
//!
//! The crate is organised as:
//!
//! - [`nn`]: a small dense network with manual backpropagation and Adam.
//! - [`lilaw`]: weight functions, weighted loss, parameter gradients, meta-update.
//! - [`data`]: datasets, synthetic blobs, IDX and delimited-text loaders, splits.
//! - [`noise`]: seeded label and input noise injection.
//! - [`metrics`]: top-k, AUROC/AUPRC, temperature scaling, mislabel detection.
//! - [`trainer`]: the bi-level training loop and its run log.
//! - [`report`]: CSV serialisation shared by the library and the CLI.

pub mod data;
pub mod error;
pub mod lilaw;
pub mod metrics;
pub mod nn;
pub mod noise;
pub mod report;
pub mod trainer;

pub use error::{Error, Result};
