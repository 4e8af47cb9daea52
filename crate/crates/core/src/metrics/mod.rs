//! Evaluation metrics.

mod calibration;
mod mislabel;
mod ranking;

pub use calibration::{fit_temperature, mean_nll, Temperature, T_MAX, T_MIN};
pub use mislabel::{mislabel_detection_report, MislabelScore, Orientation};
pub use ranking::{auprc_binary, auroc_binary, macro_ovr_auroc, top_k_accuracy, Positive, ScoredFlags};
