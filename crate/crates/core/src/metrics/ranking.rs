use std::cmp::Ordering;

use crate::nn::Matrix;
use crate::{Error, Result};

/// Percentage of rows whose label is among the `k` largest logits. Ties rank
/// the lower class index first.
pub fn top_k_accuracy(logits: &Matrix, labels: &[usize], k: usize) -> Result<f64> {
    let n = logits.rows();
    let c = logits.cols();
    if n == 0 {
        return Err(Error::Empty("top-k accuracy input"));
    }
    if labels.len() != n {
        return Err(Error::Shape(format!("{n} rows but {} labels", labels.len())));
    }
    if k == 0 || k > c {
        return Err(Error::InvalidArgument(format!("k = {k} must lie in 1..={c}")));
    }
    let mut hits = 0usize;
    for (row, &y) in logits.iter_rows().zip(labels) {
        if y >= c {
            return Err(Error::LabelOutOfRange { label: y, classes: c });
        }
        let target = row[y];
        let ahead = row
            .iter()
            .enumerate()
            .filter(|&(j, &v)| v > target || (v == target && j < y))
            .count();
        if ahead < k {
            hits += 1;
        }
    }
    Ok(100.0 * hits as f64 / n as f64)
}

/// Which flag value is the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Positive {
    /// Flag 0.
    Mislabeled,
    /// Flag 1.
    Clean,
}

impl Positive {
    #[inline]
    fn is_positive(self, clean: bool) -> bool {
        match self {
            Positive::Mislabeled => !clean,
            Positive::Clean => clean,
        }
    }
}

/// Scores paired with clean flags (`true` = correctly labelled).
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredFlags {
    scores: Vec<f64>,
    flags: Vec<bool>,
}

impl ScoredFlags {
    pub fn new(scores: Vec<f64>, flags: Vec<bool>) -> Result<Self> {
        if scores.len() != flags.len() {
            return Err(Error::Shape(format!("{} scores but {} flags", scores.len(), flags.len())));
        }
        if scores.iter().any(|s| s.is_nan()) {
            return Err(Error::NonFinite("scores"));
        }
        Ok(Self { scores, flags })
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    /// `(positives, negatives)` per tie group, groups in ascending score order.
    fn tie_groups(&self, positive: Positive) -> Vec<(usize, usize)> {
        let mut order: Vec<usize> = (0..self.scores.len()).collect();
        order.sort_by(|&a, &b| self.scores[a].total_cmp(&self.scores[b]));
        let mut groups: Vec<(usize, usize)> = Vec::new();
        let mut prev: Option<f64> = None;
        for i in order {
            let s = self.scores[i];
            if prev.map_or(true, |p| p.partial_cmp(&s) != Some(Ordering::Equal)) {
                groups.push((0, 0));
                prev = Some(s);
            }
            let g = groups.last_mut().unwrap();
            if positive.is_positive(self.flags[i]) {
                g.0 += 1;
            } else {
                g.1 += 1;
            }
        }
        groups
    }
}

/// Probability that a random positive outscores a random negative, ties
/// counting one half.
pub fn auroc_binary(sf: &ScoredFlags, positive: Positive) -> Result<f64> {
    let groups = sf.tie_groups(positive);
    let pos: usize = groups.iter().map(|g| g.0).sum();
    let neg: usize = groups.iter().map(|g| g.1).sum();
    if pos == 0 || neg == 0 {
        return Err(Error::Undefined {
            metric: "AUROC",
            reason: format!("{pos} positives and {neg} negatives"),
        });
    }
    let mut below = 0usize;
    let mut wins = 0.0;
    for (p, n) in groups {
        wins += p as f64 * (below as f64 + 0.5 * n as f64);
        below += n;
    }
    Ok(wins / (pos as f64 * neg as f64))
}

/// Average precision: area under the step precision-recall curve, sweeping
/// thresholds from high to low score with each tie group taken at once.
pub fn auprc_binary(sf: &ScoredFlags, positive: Positive) -> Result<f64> {
    let groups = sf.tie_groups(positive);
    let pos: usize = groups.iter().map(|g| g.0).sum();
    if pos == 0 {
        return Err(Error::Undefined {
            metric: "AUPRC",
            reason: "no positive samples".into(),
        });
    }
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut area = 0.0;
    for &(p, n) in groups.iter().rev() {
        tp += p;
        fp += n;
        area += (p as f64 / pos as f64) * (tp as f64 / (tp + fp) as f64);
    }
    Ok(area)
}

/// Unweighted mean of one-vs-rest AUROC over the classes present in `labels`.
pub fn macro_ovr_auroc(probs: &Matrix, labels: &[usize]) -> Result<f64> {
    let n = probs.rows();
    let c = probs.cols();
    if labels.len() != n {
        return Err(Error::Shape(format!("{n} rows but {} labels", labels.len())));
    }
    if let Some(&y) = labels.iter().find(|&&y| y >= c) {
        return Err(Error::LabelOutOfRange { label: y, classes: c });
    }
    let mut present = vec![false; c];
    labels.iter().for_each(|&y| present[y] = true);
    let classes: Vec<usize> = (0..c).filter(|&k| present[k]).collect();
    if classes.len() < 2 {
        return Err(Error::Undefined {
            metric: "macro AUROC",
            reason: format!("{} class(es) present", classes.len()),
        });
    }
    let mut total = 0.0;
    for &k in &classes {
        let scores = (0..n).map(|i| probs.get(i, k)).collect();
        let flags = labels.iter().map(|&y| y == k).collect();
        total += auroc_binary(&ScoredFlags::new(scores, flags)?, Positive::Clean)?;
    }
    Ok(total / classes.len() as f64)
}
