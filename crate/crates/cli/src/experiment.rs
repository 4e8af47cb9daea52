use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use lilaw_core::data::{gen_blobs, load_delim, load_idx, split_indices, split_train_val, LabeledDataset, SplitSpec};
use lilaw_core::metrics::mislabel_detection_report;
use lilaw_core::noise::{inject, NoiseSpec};
use lilaw_core::report::{mislabel_csv, runlog_csv, weights_csv};
use lilaw_core::trainer::train;

use crate::config::{level_key, Arm, DatasetSpec, LoadedConfig};
use crate::summary;

/// `<arm>_n<level>`, the condition label used in file names.
pub fn condition_label(arm: Arm, level: f64) -> String {
    format!("{}_n{}", arm.name(), level_key(level))
}

/// Decorrelates the per-purpose seeds derived from one run seed.
fn derive_seed(seed: u64, purpose: u64) -> u64 {
    let mut z = seed ^ purpose.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const TRAIN_NOISE: u64 = 1;
const VAL_NOISE: u64 = 2;

/// Training pool and test set. File-backed data is loaded once.
enum Source {
    Generated {
        classes: usize,
        per_class: usize,
        dim: usize,
        separation: f64,
        seed: u64,
        resample_per_seed: bool,
    },
    Files { pool: LabeledDataset, test: LabeledDataset },
}

fn split_off_test(ds: &LabeledDataset, fraction: f64, seed: u64) -> Result<(LabeledDataset, LabeledDataset)> {
    let (pool, test) = split_indices(ds, SplitSpec { val_fraction: fraction, seed })?;
    Ok((ds.subset(&pool), ds.subset(&test)))
}

impl Source {
    fn open(loaded: &LoadedConfig) -> Result<Self> {
        let fraction = loaded.config.split.test_fraction;
        let spec = loaded.config.dataset.spec().context("incomplete [dataset] section")?;
        let (pool, test) = match spec {
            DatasetSpec::Blobs {
                classes,
                per_class,
                dim,
                separation,
                seed,
                resample_per_seed,
            } => {
                return Ok(Source::Generated {
                    classes,
                    per_class,
                    dim,
                    separation,
                    seed,
                    resample_per_seed,
                })
            }
            DatasetSpec::Idx {
                train_images,
                train_labels,
                test,
            } => {
                let load = |i: &Path, l: &Path| {
                    let (i, l) = (loaded.resolve(i), loaded.resolve(l));
                    load_idx(&i, &l).with_context(|| format!("loading {} and {}", i.display(), l.display()))
                };
                let train = load(&train_images, &train_labels)?;
                match test {
                    Some((i, l)) => (train, load(&i, &l)?),
                    None => split_off_test(&train, fraction, 0)?,
                }
            }
            DatasetSpec::Delim {
                train_path,
                test_path,
                label_column,
                delimiter,
            } => {
                let load = |p: &Path| {
                    let p = loaded.resolve(p);
                    load_delim(&p, label_column, delimiter).with_context(|| format!("loading {}", p.display()))
                };
                let train = load(&train_path)?;
                match test_path {
                    Some(p) => (train, load(&p)?),
                    None => split_off_test(&train, fraction, 0)?,
                }
            }
        };
        // class counts come from the largest label seen, so align them
        let classes = pool.class_count().max(test.class_count());
        Ok(Source::Files {
            pool: with_class_count(pool, classes)?,
            test: with_class_count(test, classes)?,
        })
    }

    fn pool_and_test(&self, test_fraction: f64, seed: u64) -> Result<(LabeledDataset, LabeledDataset)> {
        match *self {
            Source::Files { ref pool, ref test } => Ok((pool.clone(), test.clone())),
            Source::Generated {
                classes,
                per_class,
                dim,
                separation,
                seed: base,
                resample_per_seed,
            } => {
                let data_seed = if resample_per_seed { base.wrapping_add(seed) } else { base };
                let ds = gen_blobs(data_seed, classes, per_class, dim, separation)?;
                split_off_test(&ds, test_fraction, data_seed)
            }
        }
    }
}

fn with_class_count(ds: LabeledDataset, classes: usize) -> Result<LabeledDataset> {
    if ds.class_count() == classes {
        return Ok(ds);
    }
    let geometry = ds.image_geometry();
    let out = LabeledDataset::with_noisy_labels(
        ds.features().clone(),
        ds.observed_labels().to_vec(),
        ds.clean_labels().to_vec(),
        classes,
    )?;
    Ok(match geometry {
        Some(g) => out.with_geometry(g)?,
        None => out,
    })
}

fn write(path: PathBuf, contents: &str) -> Result<()> {
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}

/// Trains every (noise level, seed, condition) combination and writes its
/// artifacts plus `summary.csv` into the output directory.
pub fn run(loaded: &LoadedConfig) -> Result<PathBuf> {
    let out = loaded.output_dir();
    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let source = Source::open(loaded)?;
    let arms = loaded.arms();
    let kind = loaded.noise_kind();
    let noise = &loaded.config.noise;
    let mut runlogs = Vec::new();

    for &level in &noise.levels {
        for &seed in &loaded.config.seeds {
            let (pool, test) = source.pool_and_test(loaded.config.split.test_fraction, seed)?;
            let (mut train_ds, mut val_ds) = split_train_val(
                &pool,
                SplitSpec {
                    val_fraction: loaded.config.split.val_fraction,
                    seed,
                },
            )?;
            if level > 0.0 {
                if noise.train {
                    let spec = NoiseSpec { kind, level, seed: derive_seed(seed, TRAIN_NOISE) };
                    train_ds = inject(&train_ds, &spec)?.0;
                }
                if noise.val {
                    let spec = NoiseSpec { kind, level, seed: derive_seed(seed, VAL_NOISE) };
                    val_ds = inject(&val_ds, &spec)?.0;
                }
            }

            for &arm in &arms {
                let label = condition_label(arm, level);
                let config = loaded.train_config(arm, seed);
                let (_, log) = train(&config, &train_ds, &val_ds, &test)
                    .with_context(|| format!("training {label} with seed {seed}"))?;
                let runlog = out.join(format!("runlog_{label}_{seed}.csv"));
                write(runlog.clone(), &runlog_csv(&log))?;
                runlogs.push(runlog);

                let flags = train_ds.clean_flags();
                for snap in &log.snapshots {
                    write(
                        out.join(format!("weights_{label}_{seed}_epoch{}.csv", snap.epoch)),
                        &weights_csv(&snap.table, flags),
                    )?;
                }
                let mixed = flags.iter().any(|&f| f) && flags.iter().any(|&f| !f);
                if let (Some(last), true) = (log.snapshots.last(), mixed) {
                    let scores = mislabel_detection_report(&last.table, flags)?;
                    write(out.join(format!("mislabel_{label}_{seed}.csv")), &mislabel_csv(&scores))?;
                }
                if let Some(r) = log.records.last() {
                    eprintln!(
                        "{label} seed {seed}: {} epochs, test top-1 {:.2}%",
                        log.records.len(),
                        r.test_top1
                    );
                }
            }
        }
    }

    let rows = summary::from_runlogs(&runlogs)?;
    let path = out.join(summary::FILE_NAME);
    write(path.clone(), &summary::to_csv(&rows))?;
    Ok(path)
}
