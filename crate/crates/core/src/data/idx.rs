use std::fs;
use std::path::Path;

use crate::data::{ImageGeometry, LabeledDataset};
use crate::nn::Matrix;
use crate::{Error, Result};

pub const IMAGE_MAGIC: u32 = 0x0000_0803;
pub const LABEL_MAGIC: u32 = 0x0000_0801;

struct Reader<'a> {
    path: &'a Path,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos + n;
        if end > self.bytes.len() {
            return Err(Error::Truncated {
                path: self.path.to_path_buf(),
                expected: end,
                found: self.bytes.len(),
            });
        }
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32_be(&mut self) -> Result<u32> {
        let b = self.take(4)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn magic(&mut self, expected: u32) -> Result<()> {
        let found = self.u32_be()?;
        if found != expected {
            return Err(Error::BadMagic {
                path: self.path.to_path_buf(),
                found,
                expected,
            });
        }
        Ok(())
    }
}

/// Loads an IDX image file (`0x00000803`, `n x rows x cols` unsigned bytes)
/// and its IDX label file (`0x00000801`). Pixels are scaled to `[0, 1]`;
/// the class count is the largest label plus one.
pub fn load_idx(images_path: impl AsRef<Path>, labels_path: impl AsRef<Path>) -> Result<LabeledDataset> {
    let images_path = images_path.as_ref();
    let labels_path = labels_path.as_ref();
    let image_bytes = fs::read(images_path)?;
    let label_bytes = fs::read(labels_path)?;

    let mut img = Reader {
        path: images_path,
        bytes: &image_bytes,
        pos: 0,
    };
    img.magic(IMAGE_MAGIC)?;
    let n_images = img.u32_be()? as usize;
    let height = img.u32_be()? as usize;
    let width = img.u32_be()? as usize;

    let mut lab = Reader {
        path: labels_path,
        bytes: &label_bytes,
        pos: 0,
    };
    lab.magic(LABEL_MAGIC)?;
    let n_labels = lab.u32_be()? as usize;
    if n_images != n_labels {
        return Err(Error::CountMismatch {
            images: n_images,
            labels: n_labels,
        });
    }

    let pixels = img.take(n_images * height * width)?;
    let labels: Vec<usize> = lab.take(n_labels)?.iter().map(|&b| b as usize).collect();

    let data = pixels.iter().map(|&b| f64::from(b) / 255.0).collect();
    let features = Matrix::from_vec(n_images, height * width, data)?;
    let class_count = labels.iter().max().map_or(0, |m| m + 1);
    LabeledDataset::new(features, labels, class_count)?.with_geometry(ImageGeometry {
        height,
        width,
        channels: 1,
    })
}
