use crate::nn::Matrix;
use crate::{Error, Result};

/// Pixel layout of image features: row-major, channels interleaved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ImageGeometry {
    pub height: usize,
    pub width: usize,
    pub channels: usize,
}

impl ImageGeometry {
    pub fn pixel_count(&self) -> usize {
        self.height * self.width * self.channels
    }
}

/// Features with observed (possibly corrupted) labels, the clean labels they
/// came from, and per-sample clean flags.
///
/// `clean_flags[i]` is always `observed_labels[i] == clean_labels[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    features: Matrix,
    observed_labels: Vec<usize>,
    clean_labels: Vec<usize>,
    clean_flags: Vec<bool>,
    class_count: usize,
    image_geometry: Option<ImageGeometry>,
}

impl LabeledDataset {
    /// A noiseless dataset: observed labels equal clean labels.
    pub fn new(features: Matrix, labels: Vec<usize>, class_count: usize) -> Result<Self> {
        Self::with_noisy_labels(features, labels.clone(), labels, class_count)
    }

    pub fn with_noisy_labels(
        features: Matrix,
        observed_labels: Vec<usize>,
        clean_labels: Vec<usize>,
        class_count: usize,
    ) -> Result<Self> {
        let n = features.rows();
        if observed_labels.len() != n || clean_labels.len() != n {
            return Err(Error::Shape(format!(
                "{n} feature rows, {} observed labels, {} clean labels",
                observed_labels.len(),
                clean_labels.len()
            )));
        }
        if let Some(&label) = observed_labels
            .iter()
            .chain(&clean_labels)
            .find(|&&y| y >= class_count)
        {
            return Err(Error::LabelOutOfRange {
                label,
                classes: class_count,
            });
        }
        let clean_flags = observed_labels
            .iter()
            .zip(&clean_labels)
            .map(|(a, b)| a == b)
            .collect();
        Ok(Self {
            features,
            observed_labels,
            clean_labels,
            clean_flags,
            class_count,
            image_geometry: None,
        })
    }

    pub fn with_geometry(mut self, geometry: ImageGeometry) -> Result<Self> {
        if geometry.pixel_count() != self.features.cols() {
            return Err(Error::Shape(format!(
                "geometry {}x{}x{} does not cover {} features",
                geometry.height,
                geometry.width,
                geometry.channels,
                self.features.cols()
            )));
        }
        self.image_geometry = Some(geometry);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.features.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.features.cols()
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn observed_labels(&self) -> &[usize] {
        &self.observed_labels
    }

    pub fn clean_labels(&self) -> &[usize] {
        &self.clean_labels
    }

    pub fn clean_flags(&self) -> &[bool] {
        &self.clean_flags
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn image_geometry(&self) -> Option<ImageGeometry> {
        self.image_geometry
    }

    /// Copy with new observed labels; clean labels stay, flags are recomputed.
    pub fn relabeled(&self, observed_labels: Vec<usize>) -> Result<Self> {
        let mut out = Self::with_noisy_labels(
            self.features.clone(),
            observed_labels,
            self.clean_labels.clone(),
            self.class_count,
        )?;
        out.image_geometry = self.image_geometry;
        Ok(out)
    }

    /// Copy with new features of the same shape; labels and flags stay.
    pub fn with_features(&self, features: Matrix) -> Result<Self> {
        if features.rows() != self.features.rows() || features.cols() != self.features.cols() {
            return Err(Error::Shape("replacement features must keep the dataset shape".into()));
        }
        Ok(Self {
            features,
            ..self.clone()
        })
    }

    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            features: self.features.select_rows(indices),
            observed_labels: indices.iter().map(|&i| self.observed_labels[i]).collect(),
            clean_labels: indices.iter().map(|&i| self.clean_labels[i]).collect(),
            clean_flags: indices.iter().map(|&i| self.clean_flags[i]).collect(),
            class_count: self.class_count,
            image_geometry: self.image_geometry,
        }
    }

    pub fn mislabeled_count(&self) -> usize {
        self.clean_flags.iter().filter(|f| !**f).count()
    }
}
