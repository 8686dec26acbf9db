//! Labeled feature datasets and their CSV interchange format.
//!
//! The canonical file layout is 26 feature columns in [`FeatureVector`]
//! order plus a final `LABEL` column holding `REAL` or `FAKE`. The reader
//! additionally accepts a documented set of header aliases (`chromagram`,
//! `zcr`, `mfcc_3`, arbitrary column order, …) so published feature files
//! load without editing; the writer always emits canonical names.
//!
//! Analysis layers (stats, models, eval) run on f64 rows regardless of the
//! scalar type used during extraction.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsp::{FeatureVector, NUM_FEATURES};

/// Class label; `FAKE` is the positive class everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Label {
    Real,
    Fake,
}

impl Label {
    /// Numeric encoding used by correlation and score math: REAL=0, FAKE=1.
    pub fn as_f64(self) -> f64 {
        match self {
            Label::Real => 0.0,
            Label::Fake => 1.0,
        }
    }

    /// {−1, +1} encoding for margin-based models.
    pub fn as_pm1(self) -> f64 {
        match self {
            Label::Real => -1.0,
            Label::Fake => 1.0,
        }
    }

    pub fn flip(self) -> Label {
        match self {
            Label::Real => Label::Fake,
            Label::Fake => Label::Real,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Real => "REAL",
            Label::Fake => "FAKE",
        })
    }
}

/// Error for [`Label::from_str`]: the input is neither REAL nor FAKE.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("expected REAL or FAKE, got {0:?}")]
pub struct ParseLabelError(pub String);

impl FromStr for Label {
    type Err = ParseLabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "REAL" => Ok(Label::Real),
            "FAKE" => Ok(Label::Fake),
            _ => Err(ParseLabelError(s.to_string())),
        }
    }
}

/// Canonical feature column names, in [`FeatureVector`] order.
pub fn feature_names() -> [&'static str; NUM_FEATURES] {
    [
        "chroma_stft",
        "rms",
        "spectral_centroid",
        "spectral_bandwidth",
        "rolloff",
        "zero_crossing_rate",
        "mfcc1",
        "mfcc2",
        "mfcc3",
        "mfcc4",
        "mfcc5",
        "mfcc6",
        "mfcc7",
        "mfcc8",
        "mfcc9",
        "mfcc10",
        "mfcc11",
        "mfcc12",
        "mfcc13",
        "mfcc14",
        "mfcc15",
        "mfcc16",
        "mfcc17",
        "mfcc18",
        "mfcc19",
        "mfcc20",
    ]
}

pub const LABEL_COLUMN: &str = "LABEL";

#[derive(Debug, Error)]
pub enum DataError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing required columns: {names}")]
    MissingColumns { names: String },
    #[error("unrecognized column {name:?} (accepted: canonical feature names, documented aliases, LABEL)")]
    UnknownColumn { name: String },
    #[error("column {name:?} appears more than once")]
    DuplicateColumn { name: String },
    #[error("row {row}, column {column:?}: {value:?} is not a finite number")]
    BadCell {
        row: usize,
        column: String,
        value: String,
    },
    #[error("row {row}: label {value:?} is not REAL or FAKE")]
    BadLabel { row: usize, value: String },
    #[error("rows and labels differ in length: {rows} vs {labels}")]
    LengthMismatch { rows: usize, labels: usize },
}

/// Feature rows plus their class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    rows: Vec<FeatureVector<f64>>,
    labels: Vec<Label>,
    feature_names: Vec<String>,
}

impl LabeledDataset {
    pub fn new(rows: Vec<FeatureVector<f64>>, labels: Vec<Label>) -> Result<Self, DataError> {
        if rows.len() != labels.len() {
            return Err(DataError::LengthMismatch {
                rows: rows.len(),
                labels: labels.len(),
            });
        }
        Ok(Self {
            rows,
            labels,
            feature_names: feature_names().iter().map(|s| s.to_string()).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[FeatureVector<f64>] {
        &self.rows
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn row(&self, i: usize) -> &FeatureVector<f64> {
        &self.rows[i]
    }

    pub fn label(&self, i: usize) -> Label {
        self.labels[i]
    }

    pub fn class_count(&self, label: Label) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    /// All values of feature `j`, in row order.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r.as_slice()[j]).collect()
    }

    /// Values of feature `j` restricted to one class.
    pub fn class_column(&self, label: Label, j: usize) -> Vec<f64> {
        self.rows
            .iter()
            .zip(&self.labels)
            .filter(|(_, &l)| l == label)
            .map(|(r, _)| r.as_slice()[j])
            .collect()
    }

    /// New dataset holding the given row indices, in the given order.
    pub fn subset(&self, indices: &[usize]) -> LabeledDataset {
        LabeledDataset {
            rows: indices.iter().map(|&i| self.rows[i]).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            feature_names: self.feature_names.clone(),
        }
    }

    /// Resolve a feature name (canonical or alias) to its column index.
    pub fn feature_index(name: &str) -> Option<usize> {
        match resolve_column(name) {
            Some(ColumnTarget::Feature(j)) => Some(j),
            _ => None,
        }
    }
}

enum ColumnTarget {
    Feature(usize),
    Label,
    Ignored,
}

/// Map a header cell onto its column role. Matching is case-insensitive and
/// ignores separators, so `MFCC 3`, `mfcc_3` and `mfcc3` are the same column.
fn resolve_column(raw: &str) -> Option<ColumnTarget> {
    let norm: String = raw
        .chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .collect::<String>()
        .to_ascii_lowercase();
    if norm.is_empty() || norm == "unnamed0" {
        // pandas-style unnamed index column
        return Some(ColumnTarget::Ignored);
    }
    if norm == "label" || norm == "class" {
        return Some(ColumnTarget::Label);
    }
    let j = match norm.as_str() {
        "chromastft" | "chroma" | "chromagram" => 0,
        "rms" | "rmse" => 1,
        "spectralcentroid" | "centroid" => 2,
        "spectralbandwidth" | "bandwidth" => 3,
        "rolloff" | "spectralrolloff" => 4,
        "zerocrossingrate" | "zcr" => 5,
        _ => {
            let n: usize = norm.strip_prefix("mfcc")?.parse().ok()?;
            if (1..=20).contains(&n) {
                5 + n
            } else {
                return None;
            }
        }
    };
    Some(ColumnTarget::Feature(j))
}

/// Read a dataset CSV, accepting canonical names or aliases in any order.
pub fn read_csv(path: &Path) -> Result<LabeledDataset, DataError> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();

    let mut feature_cols: [Option<usize>; NUM_FEATURES] = [None; NUM_FEATURES];
    let mut label_col: Option<usize> = None;
    for (idx, raw) in headers.iter().enumerate() {
        match resolve_column(raw) {
            Some(ColumnTarget::Feature(j)) => {
                if feature_cols[j].is_some() {
                    return Err(DataError::DuplicateColumn {
                        name: raw.to_string(),
                    });
                }
                feature_cols[j] = Some(idx);
            }
            Some(ColumnTarget::Label) => {
                if label_col.is_some() {
                    return Err(DataError::DuplicateColumn {
                        name: raw.to_string(),
                    });
                }
                label_col = Some(idx);
            }
            Some(ColumnTarget::Ignored) => {}
            None => {
                return Err(DataError::UnknownColumn {
                    name: raw.to_string(),
                })
            }
        }
    }

    let names = feature_names();
    let mut missing: Vec<&str> = (0..NUM_FEATURES)
        .filter(|&j| feature_cols[j].is_none())
        .map(|j| names[j])
        .collect();
    if label_col.is_none() {
        missing.push(LABEL_COLUMN);
    }
    if !missing.is_empty() {
        return Err(DataError::MissingColumns {
            names: missing.join(", "),
        });
    }
    let label_col = label_col.unwrap();

    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row_no = i + 2; // 1-based, counting the header line
        let mut values = [0.0f64; NUM_FEATURES];
        for (j, v) in values.iter_mut().enumerate() {
            let cell = record.get(feature_cols[j].unwrap()).unwrap_or("");
            *v = match cell.trim().parse::<f64>() {
                Ok(x) if x.is_finite() => x,
                _ => {
                    return Err(DataError::BadCell {
                        row: row_no,
                        column: names[j].to_string(),
                        value: cell.to_string(),
                    })
                }
            };
        }
        let cell = record.get(label_col).unwrap_or("");
        let label = cell.parse::<Label>().map_err(|_| DataError::BadLabel {
            row: row_no,
            value: cell.to_string(),
        })?;
        rows.push(FeatureVector::new(values));
        labels.push(label);
    }

    LabeledDataset::new(rows, labels)
}

/// Write a dataset CSV with the canonical header.
pub fn write_csv(path: &Path, ds: &LabeledDataset) -> Result<(), DataError> {
    let mut writer = csv::Writer::from_path(path)?;
    write_csv_to(&mut writer, ds)
}

fn write_csv_to<W: std::io::Write>(
    writer: &mut csv::Writer<W>,
    ds: &LabeledDataset,
) -> Result<(), DataError> {
    let mut header: Vec<&str> = feature_names().to_vec();
    header.push(LABEL_COLUMN);
    writer.write_record(&header)?;
    for (row, label) in ds.rows().iter().zip(ds.labels()) {
        let mut record: Vec<String> = row.as_slice().iter().map(|v| v.to_string()).collect();
        record.push(label.to_string());
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

/// Per-class row counts, keyed for stable display order.
pub fn class_counts(ds: &LabeledDataset) -> BTreeMap<String, usize> {
    let mut m = BTreeMap::new();
    m.insert(Label::Real.to_string(), ds.class_count(Label::Real));
    m.insert(Label::Fake.to_string(), ds.class_count(Label::Fake));
    m
}
