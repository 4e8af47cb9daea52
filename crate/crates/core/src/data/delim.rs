use std::path::Path;

use crate::data::LabeledDataset;
use crate::nn::Matrix;
use crate::{Error, Result};

/// A rectangular text table, cells kept as strings.
#[derive(Debug, Clone, PartialEq)]
pub struct DelimTable {
    pub header: Option<Vec<String>>,
    pub rows: Vec<Vec<String>>,
    /// 1-based source line of each row, for error messages.
    pub lines: Vec<u64>,
}

impl DelimTable {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.as_ref()?.iter().position(|h| h == name)
    }

    pub fn f64_at(&self, path: &Path, row: usize, col: usize) -> Result<f64> {
        let cell = &self.rows[row][col];
        cell.parse::<f64>().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: self.lines[row],
            message: format!("column {} holds non-numeric value {cell:?}", col + 1),
        })
    }
}

fn delimiter_byte(delimiter: char) -> Result<u8> {
    if delimiter.is_ascii() && delimiter != '\n' && delimiter != '\r' {
        Ok(delimiter as u8)
    } else {
        Err(Error::InvalidArgument(format!(
            "delimiter must be a single ASCII character, got {delimiter:?}"
        )))
    }
}

/// Reads a delimited file; every row must have the same number of cells.
pub fn read_table(path: impl AsRef<Path>, delimiter: char, has_header: bool) -> Result<DelimTable> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter_byte(delimiter)?)
        .has_headers(has_header)
        .trim(csv::Trim::All)
        .flexible(false)
        .from_path(path)?;
    let header = if has_header {
        Some(reader.headers()?.iter().map(str::to_owned).collect())
    } else {
        None
    };
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| match e.kind() {
            csv::ErrorKind::UnequalLengths {
                pos,
                expected_len,
                len,
            } => Error::Parse {
                path: path.to_path_buf(),
                line: pos.as_ref().map_or(0, |p| p.line()),
                message: format!("ragged row: {len} cells, expected {expected_len}"),
            },
            _ => Error::Csv(e),
        })?;
        lines.push(record.position().map_or(0, |p| p.line()));
        rows.push(record.iter().map(str::to_owned).collect());
    }
    Ok(DelimTable { header, rows, lines })
}

/// Loads a headerless numeric table. Column `label_column` holds integer
/// class labels starting at 0; every other column is a feature. The class
/// count is the largest label plus one.
pub fn load_delim(path: impl AsRef<Path>, label_column: usize, delimiter: char) -> Result<LabeledDataset> {
    let path = path.as_ref();
    let table = read_table(path, delimiter, false)?;
    let width = table.rows.first().map_or(0, Vec::len);
    if !table.rows.is_empty() && label_column >= width {
        return Err(Error::InvalidArgument(format!(
            "label column {label_column} out of range for {width} columns"
        )));
    }
    let dim = width.saturating_sub(1);
    let mut data = Vec::with_capacity(table.rows.len() * dim);
    let mut labels = Vec::with_capacity(table.rows.len());
    for (r, row) in table.rows.iter().enumerate() {
        for c in 0..row.len() {
            if c == label_column {
                let cell = &row[c];
                let label: i64 = cell.parse().map_err(|_| Error::Parse {
                    path: path.to_path_buf(),
                    line: table.lines[r],
                    message: format!("label {cell:?} is not an integer"),
                })?;
                if label < 0 {
                    return Err(Error::Parse {
                        path: path.to_path_buf(),
                        line: table.lines[r],
                        message: format!("negative label {label}"),
                    });
                }
                labels.push(label as usize);
            } else {
                let v = table.f64_at(path, r, c)?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        path: path.to_path_buf(),
                        line: table.lines[r],
                        message: format!("non-finite value in column {}", c + 1),
                    });
                }
                data.push(v);
            }
        }
    }
    let class_count = labels.iter().max().map_or(0, |m| m + 1);
    LabeledDataset::new(Matrix::from_vec(labels.len(), dim, data)?, labels, class_count)
}

/// Writes observed labels and features in the layout [`load_delim`] reads.
/// Floats use the shortest exact decimal form.
pub fn write_delim(path: impl AsRef<Path>, ds: &LabeledDataset, label_column: usize, delimiter: char) -> Result<()> {
    if label_column > ds.dim() {
        return Err(Error::InvalidArgument(format!(
            "label column {label_column} out of range for {} columns",
            ds.dim() + 1
        )));
    }
    let mut writer = csv::WriterBuilder::new()
        .delimiter(delimiter_byte(delimiter)?)
        .has_headers(false)
        .from_path(path)?;
    for (row, label) in ds.features().iter_rows().zip(ds.observed_labels()) {
        let mut cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        cells.insert(label_column, label.to_string());
        writer.write_record(&cells)?;
    }
    writer.flush()?;
    Ok(())
}
