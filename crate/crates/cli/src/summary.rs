//! Across-seed aggregation of runlogs.
//!
//! Each runlog contributes the test metrics of its last epoch. Means and
//! standard deviations are taken over seeds; deltas are against the baseline
//! of the same noise level and are only filled when both cover the same seeds.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use lilaw_core::data::read_table;
use lilaw_core::report::fmt_float;

pub const FILE_NAME: &str = "summary.csv";
pub const HEADER: &str = "condition,noise_level,n_seeds,top1_mean,top1_std,topk_mean,topk_std,auroc_mean,auroc_std,delta_top1,delta_topk,delta_auroc";

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub condition: String,
    pub noise_level: String,
    pub seeds: Vec<u64>,
    /// Mean and sample standard deviation (0 for a single seed) of test
    /// top-1, top-k and macro AUROC.
    pub mean: [f64; 3],
    pub std: [f64; 3],
    /// NaN when there is no matching baseline.
    pub delta: [f64; 3],
}

/// Parts of `runlog_<condition>_n<level>_<seed>.csv`.
pub fn parse_runlog_name(name: &str) -> Option<(String, String, u64)> {
    let stem = name.strip_prefix("runlog_")?.strip_suffix(".csv")?;
    let (label, seed) = stem.rsplit_once('_')?;
    let (condition, level) = label.rsplit_once("_n")?;
    if condition.is_empty() || level.parse::<f64>().is_err() {
        return None;
    }
    Some((condition.to_owned(), level.to_owned(), seed.parse().ok()?))
}

/// Final-epoch `(test_top1, test_topk, test_auroc)` from a runlog file.
fn final_metrics(path: &Path) -> Result<[f64; 3]> {
    let table = read_table(path, ',', true)?;
    let col = |name: &str| {
        table
            .column(name)
            .ok_or_else(|| anyhow!("{}: missing column {name}", path.display()))
    };
    let cols = [col("test_top1")?, col("test_topk")?, col("test_auroc")?];
    let last = table
        .rows
        .len()
        .checked_sub(1)
        .ok_or_else(|| anyhow!("{}: no epochs recorded", path.display()))?;
    let mut out = [0.0; 3];
    for (o, c) in out.iter_mut().zip(cols) {
        *o = table.f64_at(path, last, c)?;
    }
    Ok(out)
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Rows ordered by noise level, baseline first, then by condition name.
pub fn from_runlogs(paths: &[PathBuf]) -> Result<Vec<SummaryRow>> {
    // (level, is-not-baseline, condition) -> seed -> metrics
    let mut groups: BTreeMap<(String, bool, String), BTreeMap<u64, [f64; 3]>> = BTreeMap::new();
    for path in paths {
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
        let (condition, level, seed) =
            parse_runlog_name(name).ok_or_else(|| anyhow!("{}: not a runlog file name", path.display()))?;
        let metrics = final_metrics(path).with_context(|| format!("reading {}", path.display()))?;
        groups
            .entry((level, condition != "baseline", condition))
            .or_default()
            .insert(seed, metrics);
    }

    let mut rows: Vec<SummaryRow> = groups
        .into_iter()
        .map(|((level, _, condition), by_seed)| {
            let mut mean = [0.0; 3];
            let mut std = [0.0; 3];
            for m in 0..3 {
                let values: Vec<f64> = by_seed.values().map(|v| v[m]).collect();
                (mean[m], std[m]) = mean_std(&values);
            }
            SummaryRow {
                condition,
                noise_level: level,
                seeds: by_seed.keys().copied().collect(),
                mean,
                std,
                delta: [f64::NAN; 3],
            }
        })
        .collect();

    let baselines: Vec<SummaryRow> = rows.iter().filter(|r| r.condition == "baseline").cloned().collect();
    for row in &mut rows {
        if let Some(base) = baselines
            .iter()
            .find(|b| b.noise_level == row.noise_level && b.seeds == row.seeds)
        {
            for m in 0..3 {
                row.delta[m] = row.mean[m] - base.mean[m];
            }
        }
    }
    Ok(rows)
}

/// Every runlog in `dir`.
pub fn runlogs_in(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("listing {}", dir.display()))? {
        let path = entry?.path();
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
        if parse_runlog_name(name).is_some() {
            paths.push(path);
        }
    }
    if paths.is_empty() {
        bail!("no runlog_<condition>_n<level>_<seed>.csv files in {}", dir.display());
    }
    paths.sort();
    Ok(paths)
}

pub fn to_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for r in rows {
        write!(out, "{},{},{}", r.condition, r.noise_level, r.seeds.len()).unwrap();
        for m in 0..3 {
            write!(out, ",{},{}", fmt_float(r.mean[m]), fmt_float(r.std[m])).unwrap();
        }
        for d in r.delta {
            write!(out, ",{}", fmt_float(d)).unwrap();
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn runlog_names() {
        assert_eq!(
            parse_runlog_name("runlog_lilaw-ab_n0.30_7.csv"),
            Some(("lilaw-ab".into(), "0.30".into(), 7))
        );
        assert_eq!(parse_runlog_name("runlog_baseline_n0.00_0.csv").unwrap().0, "baseline");
        assert_eq!(parse_runlog_name("runlog_lilaw_0.csv"), None);
        assert_eq!(parse_runlog_name("weights_lilaw_n0.30_0_epoch3.csv"), None);
    }

    #[test]
    fn sample_std() {
        assert_eq!(mean_std(&[2.0]), (2.0, 0.0));
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }
}
