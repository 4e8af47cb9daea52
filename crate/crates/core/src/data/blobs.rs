use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::data::LabeledDataset;
use crate::nn::Matrix;
use crate::{Error, Result};

/// `c` unit-covariance Gaussian clusters in `d` dimensions, cluster `k`
/// centred at `separation * u_k` for seeded random unit vectors `u_k`.
///
/// Samples are stored class by class.
pub fn gen_blobs(seed: u64, c: usize, n_per_class: usize, d: usize, separation: f64) -> Result<LabeledDataset> {
    if c < 2 || d < 1 {
        return Err(Error::InvalidArgument(format!(
            "blobs need at least 2 classes and 1 dimension, got c={c}, d={d}"
        )));
    }
    if !separation.is_finite() {
        return Err(Error::NonFinite("blob separation"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let means: Vec<Vec<f64>> = (0..c).map(|_| random_unit(&mut rng, d)).collect();

    let mut data = Vec::with_capacity(c * n_per_class * d);
    let mut labels = Vec::with_capacity(c * n_per_class);
    for (k, mean) in means.iter().enumerate() {
        for _ in 0..n_per_class {
            for &mu in mean {
                let z: f64 = StandardNormal.sample(&mut rng);
                data.push(separation * mu + z);
            }
            labels.push(k);
        }
    }
    LabeledDataset::new(Matrix::from_vec(c * n_per_class, d, data)?, labels, c)
}

fn random_unit(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}
