//! Datasets and ingestion.

mod blobs;
mod dataset;
mod delim;
mod idx;
mod split;

pub use blobs::gen_blobs;
pub use dataset::{ImageGeometry, LabeledDataset};
pub use delim::{load_delim, read_table, write_delim, DelimTable};
pub use idx::{load_idx, IMAGE_MAGIC, LABEL_MAGIC};
pub use split::{split_indices, split_train_val, SplitSpec};
