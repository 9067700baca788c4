//! Loading and reshaping of UCR-style train/test dataset files.
//!
//! Each file is a header-less CSV where the first field of every line is the
//! class label and the remaining fields are the series values.

use std::collections::BTreeSet;
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("dataset file not found: {0}")]
    MissingFile(PathBuf),
    #[error("dataset file is empty: {0}")]
    EmptyFile(PathBuf),
    #[error("line {line}: expected {expected} values, found {found}")]
    RaggedRow {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}, field {field}: `{token}` is not a finite number")]
    NonNumericValue {
        line: usize,
        field: usize,
        token: String,
    },
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("index {0} listed more than once")]
    DuplicateIndex(usize),
    #[error("keep list is empty")]
    EmptyKeepList,
    #[error("invalid dataset descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("invalid dataset: {0}")]
    Invalid(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error on {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

pub type Result<T, E = DatasetError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Split {
    Train,
    Test,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Split::Train => f.write_str("train"),
            Split::Test => f.write_str("test"),
        }
    }
}

/// Rectangular matrix of series (row-major) with one class label per row.
///
/// `class_universe` holds the labels present in the rows. `source_universe`
/// is the universe of the dataset this one was derived from, so that
/// evaluation can still see classes dropped by instance subsetting.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesDataset {
    name: String,
    split: Split,
    n_attributes: usize,
    values: Vec<f64>,
    labels: Vec<String>,
    class_universe: Vec<String>,
    source_universe: Vec<String>,
}

fn universe_of(labels: &[String]) -> Vec<String> {
    labels
        .iter()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

impl TimeSeriesDataset {
    /// Builds a dataset from rows, validating shape and finiteness.
    pub fn from_rows(
        name: impl Into<String>,
        split: Split,
        rows: Vec<Vec<f64>>,
        labels: Vec<String>,
    ) -> Result<Self> {
        if rows.is_empty() {
            return Err(DatasetError::Invalid("dataset has no rows".into()));
        }
        if rows.len() != labels.len() {
            return Err(DatasetError::Invalid(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        let m = rows[0].len();
        if m == 0 {
            return Err(DatasetError::Invalid("rows have no values".into()));
        }
        let mut values = Vec::with_capacity(rows.len() * m);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(DatasetError::RaggedRow {
                    line: i + 1,
                    expected: m,
                    found: row.len(),
                });
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(DatasetError::NonNumericValue {
                    line: i + 1,
                    field: j + 2,
                    token: row[j].to_string(),
                });
            }
            values.extend_from_slice(row);
        }
        let universe = universe_of(&labels);
        Ok(Self {
            name: name.into(),
            split,
            n_attributes: m,
            values,
            labels,
            class_universe: universe.clone(),
            source_universe: universe,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn split(&self) -> Split {
        self.split
    }

    pub fn n_instances(&self) -> usize {
        self.labels.len()
    }

    pub fn n_attributes(&self) -> usize {
        self.n_attributes
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let start = i * self.n_attributes;
        &self.values[start..start + self.n_attributes]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.n_attributes)
    }

    pub fn value(&self, i: usize, attribute: usize) -> f64 {
        self.values[i * self.n_attributes + attribute]
    }

    /// Copies one attribute column out of the matrix.
    pub fn column(&self, attribute: usize) -> Vec<f64> {
        self.rows().map(|r| r[attribute]).collect()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn class_universe(&self) -> &[String] {
        &self.class_universe
    }

    pub fn source_universe(&self) -> &[String] {
        &self.source_universe
    }

    /// Labels as positions in `class_universe`.
    pub fn class_indices(&self) -> Vec<usize> {
        self.labels
            .iter()
            .map(|l| {
                self.class_universe
                    .binary_search(l)
                    .expect("label is in universe")
            })
            .collect()
    }

    /// Restricts the dataset to the given columns, always in ascending
    /// column order so temporal ordering survives.
    pub fn project_attributes(&self, keep: &[usize]) -> Result<Self> {
        let keep = normalize_indices(keep, self.n_attributes)?;
        let mut values = Vec::with_capacity(self.n_instances() * keep.len());
        for row in self.rows() {
            values.extend(keep.iter().map(|&j| row[j]));
        }
        Ok(Self {
            n_attributes: keep.len(),
            values,
            ..self.clone()
        })
    }

    /// Restricts the dataset to the given rows, in ascending row order.
    pub fn subset_instances(&self, keep: &[usize]) -> Result<Self> {
        let keep = normalize_indices(keep, self.n_instances())?;
        let mut values = Vec::with_capacity(keep.len() * self.n_attributes);
        for &i in &keep {
            values.extend_from_slice(self.row(i));
        }
        let labels: Vec<String> = keep.iter().map(|&i| self.labels[i].clone()).collect();
        Ok(Self {
            name: self.name.clone(),
            split: self.split,
            n_attributes: self.n_attributes,
            values,
            class_universe: universe_of(&labels),
            labels,
            source_universe: self.source_universe.clone(),
        })
    }

    /// Writes the dataset in the same format `load_dataset` reads.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let io_err = |source| DatasetError::Io {
            path: path.to_path_buf(),
            source,
        };
        let mut out = BufWriter::new(File::create(path).map_err(io_err)?);
        for (label, row) in self.labels.iter().zip(self.rows()) {
            write!(out, "{label}").map_err(io_err)?;
            for v in row {
                // `{}` on f64 prints the shortest representation that round-trips.
                write!(out, ",{v}").map_err(io_err)?;
            }
            writeln!(out).map_err(io_err)?;
        }
        out.flush().map_err(io_err)
    }
}

fn normalize_indices(keep: &[usize], len: usize) -> Result<Vec<usize>> {
    if keep.is_empty() {
        return Err(DatasetError::EmptyKeepList);
    }
    let mut sorted = keep.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(DatasetError::DuplicateIndex(w[0]));
        }
    }
    if let Some(&last) = sorted.last() {
        if last >= len {
            return Err(DatasetError::IndexOutOfRange { index: last, len });
        }
    }
    Ok(sorted)
}

/// Where to find the `<name><suffix><extension>` pair of files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetDescriptor {
    pub directory: PathBuf,
    pub dataset_name: String,
    pub train_suffix: String,
    pub test_suffix: String,
    pub extension: String,
}

impl DatasetDescriptor {
    pub fn new(directory: impl Into<PathBuf>, dataset_name: impl Into<String>) -> Self {
        Self {
            directory: directory.into(),
            dataset_name: dataset_name.into(),
            train_suffix: "_TRAIN".into(),
            test_suffix: "_TEST".into(),
            extension: ".csv".into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dataset_name.is_empty() {
            return Err(DatasetError::InvalidDescriptor(
                "dataset name is empty".into(),
            ));
        }
        if self.train_suffix == self.test_suffix {
            return Err(DatasetError::InvalidDescriptor(
                "train and test suffixes must differ".into(),
            ));
        }
        Ok(())
    }

    pub fn path(&self, split: Split) -> PathBuf {
        let suffix = match split {
            Split::Train => &self.train_suffix,
            Split::Test => &self.test_suffix,
        };
        self.directory
            .join(format!("{}{}{}", self.dataset_name, suffix, self.extension))
    }
}

pub fn load_dataset(desc: &DatasetDescriptor, split: Split) -> Result<TimeSeriesDataset> {
    desc.validate()?;
    let path = desc.path(split);
    if !path.is_file() {
        return Err(DatasetError::MissingFile(path));
    }
    let csv_err = |source| DatasetError::Csv {
        path: path.clone(),
        source,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(&path)
        .map_err(csv_err)?;

    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut width = None;
    for (line_no, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let line = line_no + 1;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let found = record.len().saturating_sub(1);
        let expected = *width.get_or_insert(found);
        if found != expected {
            return Err(DatasetError::RaggedRow {
                line,
                expected,
                found,
            });
        }
        let mut values = Vec::with_capacity(found);
        for (field, token) in record.iter().enumerate().skip(1) {
            match token.parse::<f64>() {
                Ok(v) if v.is_finite() => values.push(v),
                _ => {
                    return Err(DatasetError::NonNumericValue {
                        line,
                        field: field + 1,
                        token: token.to_string(),
                    })
                }
            }
        }
        labels.push(record[0].to_string());
        rows.push(values);
    }
    if rows.is_empty() || width == Some(0) {
        return Err(DatasetError::EmptyFile(path));
    }
    TimeSeriesDataset::from_rows(desc.dataset_name.clone(), split, rows, labels)
}

/// Loads the train and test halves of a dataset.
pub fn load_pair(desc: &DatasetDescriptor) -> Result<(TimeSeriesDataset, TimeSeriesDataset)> {
    Ok((
        load_dataset(desc, Split::Train)?,
        load_dataset(desc, Split::Test)?,
    ))
}
