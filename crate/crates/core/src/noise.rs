//! Seeded label and input noise.
//!
//! Every injector selects samples independently: sample `i` is corrupted with
//! probability `level` (or a per-sample probability for instance noise). Label
//! injectors replace the observed label with a class different from the clean
//! label, so a corrupted sample is exactly one whose clean flag is false.
//! Input injectors perturb features and leave labels alone. Inputs are never
//! modified; a new dataset is returned.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::data::{ImageGeometry, LabeledDataset};
use crate::lilaw::sigmoid;
use crate::{Error, Result};

/// Sharpness of the instance-noise projection.
pub const INSTANCE_TAU: f64 = 2.0;
/// Noise standard deviation as a multiple of each feature's spread.
pub const COVARIATE_SCALE: f64 = 0.5;
pub const ZOOM_FACTOR: f64 = 1.5;
pub const CROP_FRACTION: f64 = 0.75;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    Uniform,
    Asymmetric,
    Instance,
    Adjacent,
    InputCovariate,
    InputZoom,
    InputCrop,
}

impl NoiseKind {
    pub const ALL: [NoiseKind; 7] = [
        NoiseKind::Uniform,
        NoiseKind::Asymmetric,
        NoiseKind::Instance,
        NoiseKind::Adjacent,
        NoiseKind::InputCovariate,
        NoiseKind::InputZoom,
        NoiseKind::InputCrop,
    ];

    pub fn is_label_noise(self) -> bool {
        matches!(
            self,
            NoiseKind::Uniform | NoiseKind::Asymmetric | NoiseKind::Instance | NoiseKind::Adjacent
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            NoiseKind::Uniform => "uniform",
            NoiseKind::Asymmetric => "asymmetric",
            NoiseKind::Instance => "instance",
            NoiseKind::Adjacent => "adjacent",
            NoiseKind::InputCovariate => "input_covariate",
            NoiseKind::InputZoom => "input_zoom",
            NoiseKind::InputCrop => "input_crop",
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NoiseKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown noise kind {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub level: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NoiseReport {
    /// Sorted, unique.
    pub corrupted_indices: Vec<usize>,
}

impl NoiseReport {
    pub fn n_corrupted(&self) -> usize {
        self.corrupted_indices.len()
    }
}

pub fn inject(ds: &LabeledDataset, spec: &NoiseSpec) -> Result<(LabeledDataset, NoiseReport)> {
    let NoiseSpec { kind, level, seed } = *spec;
    match kind {
        NoiseKind::Uniform => inject_uniform(ds, level, seed),
        NoiseKind::Asymmetric => inject_asymmetric(ds, level, seed),
        NoiseKind::Instance => inject_instance(ds, level, seed),
        NoiseKind::Adjacent => inject_adjacent(ds, level, seed),
        NoiseKind::InputCovariate => inject_input_covariate(ds, level, seed),
        NoiseKind::InputZoom => inject_input_zoom(ds, level, seed),
        NoiseKind::InputCrop => inject_input_crop(ds, level, seed),
    }
}

fn check_level(level: f64) -> Result<()> {
    if (0.0..=1.0).contains(&level) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("noise level must lie in [0, 1], got {level}")))
    }
}

fn check_classes(ds: &LabeledDataset) -> Result<usize> {
    let c = ds.class_count();
    if c < 2 {
        return Err(Error::InvalidArgument(format!("label noise needs at least 2 classes, got {c}")));
    }
    Ok(c)
}

/// Bernoulli selection with per-sample probabilities, then relabelling of
/// the selected samples via `pick(clean_label, rng)`.
fn relabel_selected(
    ds: &LabeledDataset,
    probs: impl Fn(usize) -> f64,
    rng: &mut ChaCha8Rng,
    mut pick: impl FnMut(usize, &mut ChaCha8Rng) -> usize,
) -> Result<(LabeledDataset, NoiseReport)> {
    let mut labels = ds.observed_labels().to_vec();
    let mut report = NoiseReport::default();
    for (i, &clean) in ds.clean_labels().iter().enumerate() {
        if rng.random::<f64>() < probs(i) {
            labels[i] = pick(clean, rng);
            report.corrupted_indices.push(i);
        }
    }
    Ok((ds.relabeled(labels)?, report))
}

/// A class other than `y`, uniformly.
fn other_class(y: usize, c: usize, rng: &mut ChaCha8Rng) -> usize {
    let r = rng.random_range(0..c - 1);
    if r >= y {
        r + 1
    } else {
        r
    }
}

/// Selected samples get a label drawn uniformly from the other `c - 1` classes.
pub fn inject_uniform(ds: &LabeledDataset, level: f64, seed: u64) -> Result<(LabeledDataset, NoiseReport)> {
    check_level(level)?;
    let c = check_classes(ds)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    relabel_selected(ds, |_| level, &mut rng, |y, rng| other_class(y, c, rng))
}

/// Selected samples move to `(y + 1) mod c`.
pub fn inject_asymmetric(ds: &LabeledDataset, level: f64, seed: u64) -> Result<(LabeledDataset, NoiseReport)> {
    check_level(level)?;
    let c = check_classes(ds)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    relabel_selected(ds, |_| level, &mut rng, |y, _| (y + 1) % c)
}

/// Selected samples move to `(y + 1) mod c` or `(y - 1) mod c` with equal odds.
pub fn inject_adjacent(ds: &LabeledDataset, level: f64, seed: u64) -> Result<(LabeledDataset, NoiseReport)> {
    check_level(level)?;
    let c = check_classes(ds)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    relabel_selected(ds, |_| level, &mut rng, |y, rng| {
        if rng.random::<bool>() {
            (y + 1) % c
        } else {
            (y + c - 1) % c
        }
    })
}

/// Per-sample flip probabilities for instance noise.
///
/// `raw_i = sigmoid(tau * cos(x_i, v))` for a seeded Gaussian direction `v`,
/// rescaled so the mean is `level`, then capped at 1. Zero feature vectors get
/// `cos = 0`.
pub fn instance_flip_probabilities(ds: &LabeledDataset, level: f64, seed: u64) -> Result<Vec<f64>> {
    check_level(level)?;
    if ds.is_empty() || ds.dim() == 0 {
        return Err(Error::Empty("instance noise needs a nonempty feature matrix"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    instance_probs_with(ds, level, &mut rng)
}

fn instance_probs_with(ds: &LabeledDataset, level: f64, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let v: Vec<f64> = (0..ds.dim()).map(|_| StandardNormal.sample(rng)).collect();
    let v_norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let raw: Vec<f64> = ds
        .features()
        .iter_rows()
        .map(|x| {
            let x_norm = x.iter().map(|a| a * a).sum::<f64>().sqrt();
            let cos = if x_norm == 0.0 || v_norm == 0.0 {
                0.0
            } else {
                x.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() / (x_norm * v_norm)
            };
            sigmoid(INSTANCE_TAU * cos)
        })
        .collect();
    let mean = raw.iter().sum::<f64>() / raw.len() as f64;
    Ok(raw.into_iter().map(|r| (level * r / mean).min(1.0)).collect())
}

/// Feature-dependent flips; flipped samples get a uniformly drawn other class.
pub fn inject_instance(ds: &LabeledDataset, level: f64, seed: u64) -> Result<(LabeledDataset, NoiseReport)> {
    check_level(level)?;
    let c = check_classes(ds)?;
    if ds.is_empty() || ds.dim() == 0 {
        return Err(Error::Empty("instance noise needs a nonempty feature matrix"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let probs = instance_probs_with(ds, level, &mut rng)?;
    relabel_selected(ds, |i| probs[i], &mut rng, |y, rng| other_class(y, c, rng))
}

/// Adds `N(0, (0.5 * std_j)^2)` to every feature `j` of each selected sample,
/// where `std_j` is the population spread of feature `j` in `ds`.
pub fn inject_input_covariate(ds: &LabeledDataset, level: f64, seed: u64) -> Result<(LabeledDataset, NoiseReport)> {
    check_level(level)?;
    let n = ds.len();
    let d = ds.dim();
    let x = ds.features();
    let mut spread = vec![0.0; d];
    if n > 0 {
        for (j, s) in spread.iter_mut().enumerate() {
            let mean = (0..n).map(|i| x.get(i, j)).sum::<f64>() / n as f64;
            let var = (0..n).map(|i| (x.get(i, j) - mean).powi(2)).sum::<f64>() / n as f64;
            *s = var.sqrt();
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = x.clone();
    let mut report = NoiseReport::default();
    for i in 0..n {
        if rng.random::<f64>() < level {
            for (v, &s) in out.row_mut(i).iter_mut().zip(&spread) {
                let z: f64 = StandardNormal.sample(&mut rng);
                *v += COVARIATE_SCALE * s * z;
            }
            report.corrupted_indices.push(i);
        }
    }
    Ok((ds.with_features(out)?, report))
}

/// Bilinear lookup at fractional pixel coordinates, clamped to the image.
fn bilinear(img: &[f64], g: ImageGeometry, y: f64, x: f64, ch: usize) -> f64 {
    let y = y.clamp(0.0, (g.height - 1) as f64);
    let x = x.clamp(0.0, (g.width - 1) as f64);
    let y0 = y.floor() as usize;
    let x0 = x.floor() as usize;
    let y1 = (y0 + 1).min(g.height - 1);
    let x1 = (x0 + 1).min(g.width - 1);
    let fy = y - y0 as f64;
    let fx = x - x0 as f64;
    let at = |r: usize, c: usize| img[(r * g.width + c) * g.channels + ch];
    let top = at(y0, x0) * (1.0 - fx) + at(y0, x1) * fx;
    let bottom = at(y1, x0) * (1.0 - fx) + at(y1, x1) * fx;
    top * (1.0 - fy) + bottom * fy
}

/// Resamples every output pixel from source coordinates `map(y, x)`.
fn resample(img: &[f64], g: ImageGeometry, map: impl Fn(usize, usize) -> (f64, f64)) -> Vec<f64> {
    let mut out = vec![0.0; img.len()];
    for y in 0..g.height {
        for x in 0..g.width {
            let (sy, sx) = map(y, x);
            for ch in 0..g.channels {
                out[(y * g.width + x) * g.channels + ch] = bilinear(img, g, sy, sx, ch);
            }
        }
    }
    out
}

fn perturb_images(
    ds: &LabeledDataset,
    level: f64,
    seed: u64,
    mut transform: impl FnMut(&[f64], ImageGeometry, &mut ChaCha8Rng) -> Vec<f64>,
) -> Result<(LabeledDataset, NoiseReport)> {
    check_level(level)?;
    let g = ds.image_geometry().ok_or(Error::NoGeometry)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = ds.features().clone();
    let mut report = NoiseReport::default();
    for i in 0..ds.len() {
        if rng.random::<f64>() < level {
            let img = transform(ds.features().row(i), g, &mut rng);
            out.row_mut(i).copy_from_slice(&img);
            report.corrupted_indices.push(i);
        }
    }
    Ok((ds.with_features(out)?, report))
}

/// Centre zoom by [`ZOOM_FACTOR`], resampled bilinearly to the original size.
pub fn inject_input_zoom(ds: &LabeledDataset, level: f64, seed: u64) -> Result<(LabeledDataset, NoiseReport)> {
    perturb_images(ds, level, seed, |img, g, _| {
        let cy = (g.height - 1) as f64 / 2.0;
        let cx = (g.width - 1) as f64 / 2.0;
        resample(img, g, |y, x| {
            (cy + (y as f64 - cy) / ZOOM_FACTOR, cx + (x as f64 - cx) / ZOOM_FACTOR)
        })
    })
}

/// Random window covering [`CROP_FRACTION`] of each side, stretched back to
/// the original size.
pub fn inject_input_crop(ds: &LabeledDataset, level: f64, seed: u64) -> Result<(LabeledDataset, NoiseReport)> {
    perturb_images(ds, level, seed, |img, g, rng| {
        let win_h = ((g.height as f64 * CROP_FRACTION).round() as usize).max(1);
        let win_w = ((g.width as f64 * CROP_FRACTION).round() as usize).max(1);
        let oy = rng.random_range(0..=g.height - win_h) as f64;
        let ox = rng.random_range(0..=g.width - win_w) as f64;
        let sy = if g.height > 1 { (win_h - 1) as f64 / (g.height - 1) as f64 } else { 0.0 };
        let sx = if g.width > 1 { (win_w - 1) as f64 / (g.width - 1) as f64 } else { 0.0 };
        resample(img, g, |y, x| (oy + y as f64 * sy, ox + x as f64 * sx))
    })
}
