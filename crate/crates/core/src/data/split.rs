use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::LabeledDataset;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub val_fraction: f64,
    pub seed: u64,
}

/// Stratified split of sample indices by clean label. Each class `k` with
/// `n_k` members sends `ceil(val_fraction * n_k)` of them, chosen by a seeded
/// shuffle, to validation. Both returned lists are sorted.
pub fn split_indices(ds: &LabeledDataset, spec: SplitSpec) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(spec.val_fraction > 0.0 && spec.val_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "val_fraction must lie in (0, 1), got {}",
            spec.val_fraction
        )));
    }
    if ds.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "cannot split a dataset of {} samples",
            ds.len()
        )));
    }
    let mut by_class = vec![Vec::new(); ds.class_count()];
    for (i, &y) in ds.clean_labels().iter().enumerate() {
        by_class[y].push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut train = Vec::new();
    let mut val = Vec::new();
    for mut members in by_class {
        members.shuffle(&mut rng);
        // the small slack keeps e.g. 0.15 * 100 from rounding up to 16
        let n_val = ((spec.val_fraction * members.len() as f64) - 1e-9).ceil().max(0.0) as usize;
        let n_val = n_val.min(members.len());
        val.extend_from_slice(&members[..n_val]);
        train.extend_from_slice(&members[n_val..]);
    }
    if train.is_empty() || val.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "val_fraction {} leaves an empty split ({} train, {} val)",
            spec.val_fraction,
            train.len(),
            val.len()
        )));
    }
    train.sort_unstable();
    val.sort_unstable();
    Ok((train, val))
}

pub fn split_train_val(ds: &LabeledDataset, spec: SplitSpec) -> Result<(LabeledDataset, LabeledDataset)> {
    let (train, val) = split_indices(ds, spec)?;
    Ok((ds.subset(&train), ds.subset(&val)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::gen_blobs;
    use crate::nn::Matrix;

    #[test]
    fn fifteen_percent_per_stratum() {
        let ds = gen_blobs(0, 3, 100, 2, 1.0).unwrap();
        let spec = SplitSpec {
            val_fraction: 0.15,
            seed: 4,
        };
        let (train, val) = split_train_val(&ds, spec).unwrap();
        assert_eq!((train.len(), val.len()), (255, 45));
        for k in 0..3 {
            assert_eq!(val.clean_labels().iter().filter(|&&y| y == k).count(), 15);
        }

        // uneven strata round up individually
        let labels: Vec<usize> = (0..30).map(|i| usize::from(i >= 10)).collect();
        let ds = LabeledDataset::new(Matrix::zeros(30, 1), labels, 2).unwrap();
        let (_, val) = split_indices(&ds, spec).unwrap();
        assert_eq!(val.len(), 2 + 3);
    }

    #[test]
    fn disjoint_exhaustive_deterministic() {
        let ds = gen_blobs(1, 4, 37, 2, 1.0).unwrap();
        let spec = SplitSpec {
            val_fraction: 0.3,
            seed: 11,
        };
        let (train, val) = split_indices(&ds, spec).unwrap();
        let mut all: Vec<usize> = train.iter().chain(&val).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..ds.len()).collect::<Vec<_>>());
        assert_eq!(split_indices(&ds, spec).unwrap(), (train, val));
    }

    #[test]
    fn rejects_degenerate_fractions() {
        let ds = gen_blobs(1, 2, 5, 2, 1.0).unwrap();
        for f in [0.0, 1.0, 1.5, -0.1, f64::NAN] {
            let spec = SplitSpec {
                val_fraction: f,
                seed: 0,
            };
            assert!(split_indices(&ds, spec).is_err());
        }
        // every stratum rounds up to all of its members
        let spec = SplitSpec {
            val_fraction: 0.9,
            seed: 0,
        };
        assert!(split_indices(&ds, spec).is_err());
    }
}
