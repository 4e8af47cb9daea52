use std::fs;

use lilaw_core::data::{
    gen_blobs, load_delim, load_idx, split_indices, write_delim, LabeledDataset, SplitSpec, IMAGE_MAGIC,
    LABEL_MAGIC,
};
use lilaw_core::nn::Matrix;
use lilaw_core::Error;
use proptest::prelude::*;

fn idx_images(n: u32, h: u32, w: u32, pixels: &[u8]) -> Vec<u8> {
    let mut out = Vec::new();
    for v in [IMAGE_MAGIC, n, h, w] {
        out.extend_from_slice(&v.to_be_bytes());
    }
    out.extend_from_slice(pixels);
    out
}

fn idx_labels(labels: &[u8]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(&LABEL_MAGIC.to_be_bytes());
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    out
}

#[test]
fn well_separated_blobs_are_nearly_perfectly_classified_by_centroids() {
    let ds = gen_blobs(5, 3, 2000, 2, 10.0).unwrap();
    let c = ds.class_count();
    let mut means = vec![[0.0f64; 2]; c];
    let mut counts = vec![0usize; c];
    for (x, &y) in ds.features().iter_rows().zip(ds.observed_labels()) {
        means[y][0] += x[0];
        means[y][1] += x[1];
        counts[y] += 1;
    }
    for (m, &n) in means.iter_mut().zip(&counts) {
        m[0] /= n as f64;
        m[1] /= n as f64;
    }
    let correct = ds
        .features()
        .iter_rows()
        .zip(ds.observed_labels())
        .filter(|(x, &y)| {
            let d = |k: usize| (x[0] - means[k][0]).powi(2) + (x[1] - means[k][1]).powi(2);
            (0..c).all(|k| k == y || d(y) < d(k))
        })
        .count();
    assert!(correct as f64 / ds.len() as f64 > 0.99);
}

#[test]
fn idx_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let pixels: Vec<u8> = (0..3 * 4 * 2).map(|i| (i * 11 % 256) as u8).collect();
    fs::write(dir.path().join("img"), idx_images(3, 4, 2, &pixels)).unwrap();
    fs::write(dir.path().join("lab"), idx_labels(&[2, 0, 1])).unwrap();
    let ds = load_idx(dir.path().join("img"), dir.path().join("lab")).unwrap();
    assert_eq!((ds.len(), ds.dim(), ds.class_count()), (3, 8, 3));
    for (v, &p) in ds.features().as_slice().iter().zip(&pixels) {
        assert_eq!(*v, p as f64 / 255.0);
    }
    let g = ds.image_geometry().unwrap();
    assert_eq!((g.height, g.width, g.channels), (4, 2, 1));
}

#[test]
fn idx_oversized_header_is_truncation_not_a_panic() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("img"), idx_images(u32::MAX, u32::MAX, u32::MAX, &[0; 16])).unwrap();
    fs::write(dir.path().join("lab"), idx_labels(&[0; 16])).unwrap();
    let err = load_idx(dir.path().join("img"), dir.path().join("lab")).unwrap_err();
    assert!(matches!(err, Error::Truncated { .. } | Error::CountMismatch { .. }), "{err}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn idx_loader_never_panics_on_arbitrary_bytes(
        images in prop::collection::vec(any::<u8>(), 0..64),
        labels in prop::collection::vec(any::<u8>(), 0..32),
    ) {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("img"), &images).unwrap();
        fs::write(dir.path().join("lab"), &labels).unwrap();
        let _ = load_idx(dir.path().join("img"), dir.path().join("lab"));
    }

    #[test]
    fn delimited_round_trip_is_exact(
        rows in (1usize..5).prop_flat_map(|d| prop::collection::vec(
            (prop::collection::vec(-1e6f64..1e6, d), 0usize..4), 1..30)),
        label_column in 0usize..5,
        tab in any::<bool>(),
    ) {
        let d = rows[0].0.len();
        let label_column = label_column.min(d);
        let data: Vec<f64> = rows.iter().flat_map(|r| r.0.clone()).collect();
        let labels: Vec<usize> = rows.iter().map(|r| r.1).collect();
        let c = labels.iter().max().unwrap() + 1;
        let ds = LabeledDataset::new(Matrix::from_vec(rows.len(), d, data).unwrap(), labels, c).unwrap();
        let delim = if tab { '\t' } else { ',' };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.txt");
        write_delim(&path, &ds, label_column, delim).unwrap();
        let back = load_delim(&path, label_column, delim).unwrap();
        prop_assert_eq!(back.features().as_slice(), ds.features().as_slice());
        prop_assert_eq!(back.observed_labels(), ds.observed_labels());
    }

    #[test]
    fn split_is_stratified_disjoint_and_exhaustive(
        counts in prop::collection::vec(2usize..40, 2..5),
        frac in 0.05f64..0.6,
        seed in any::<u64>(),
    ) {
        let labels: Vec<usize> = counts.iter().enumerate().flat_map(|(k, &n)| vec![k; n]).collect();
        let n = labels.len();
        let ds = LabeledDataset::new(Matrix::zeros(n, 1), labels.clone(), counts.len()).unwrap();
        let (train, val) = split_indices(&ds, SplitSpec { val_fraction: frac, seed }).unwrap();
        prop_assert_eq!(train.len() + val.len(), n);
        let mut all: Vec<usize> = train.iter().chain(&val).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        for (k, &nk) in counts.iter().enumerate() {
            let in_val = val.iter().filter(|&&i| labels[i] == k).count();
            let want = ((frac * nk as f64) - 1e-9).ceil() as usize;
            prop_assert_eq!(in_val, want.min(nk));
        }
    }
}
