use std::fmt;

use crate::lilaw::{WeightColumn, WeightTable};
use crate::metrics::{auprc_binary, auroc_binary, Positive, ScoredFlags};
use crate::{Error, Result};

/// Which direction of a weight column points at mislabelled samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    HigherMeansClean,
    HigherMeansMislabeled,
}

impl Orientation {
    pub fn name(self) -> &'static str {
        match self {
            Orientation::HigherMeansClean => "higher_is_clean",
            Orientation::HigherMeansMislabeled => "higher_is_mislabeled",
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MislabelScore {
    pub column: WeightColumn,
    pub orientation: Orientation,
    pub auroc: f64,
    pub auprc: f64,
}

/// Scores each weight column as a detector of mislabelled samples.
///
/// The orientation is chosen so the reported AUROC is at least one half.
/// Both AUROC and AUPRC treat mislabelled samples as the positive class and
/// use the column oriented so that higher means "more likely mislabelled".
pub fn mislabel_detection_report(table: &WeightTable, flags: &[bool]) -> Result<Vec<MislabelScore>> {
    if table.len() != flags.len() {
        return Err(Error::Shape(format!(
            "weight table has {} rows but {} flags",
            table.len(),
            flags.len()
        )));
    }
    let mislabeled = flags.iter().filter(|f| !**f).count();
    if mislabeled == 0 || mislabeled == flags.len() {
        return Err(Error::Undefined {
            metric: "mislabel detection",
            reason: format!("{mislabeled} of {} samples mislabelled", flags.len()),
        });
    }
    WeightColumn::ALL
        .into_iter()
        .map(|column| {
            let scores = table.column(column);
            let raw = ScoredFlags::new(scores.clone(), flags.to_vec())?;
            let orientation = if auroc_binary(&raw, Positive::Mislabeled)? >= 0.5 {
                Orientation::HigherMeansMislabeled
            } else {
                Orientation::HigherMeansClean
            };
            let oriented = match orientation {
                Orientation::HigherMeansMislabeled => raw,
                Orientation::HigherMeansClean => ScoredFlags::new(scores.iter().map(|s| -s).collect(), flags.to_vec())?,
            };
            Ok(MislabelScore {
                column,
                orientation,
                auroc: auroc_binary(&oriented, Positive::Mislabeled)?,
                auprc: auprc_binary(&oriented, Positive::Mislabeled)?,
            })
        })
        .collect()
}
