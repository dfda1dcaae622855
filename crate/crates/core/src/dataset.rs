use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Class;

#[derive(Debug, Error, PartialEq)]
pub enum DatasetError {
    #[error("row {row} has {got} values, expected {expected}")]
    RowLength { row: usize, got: usize, expected: usize },
    #[error("label at row {row} is {label}, expected 0 or 1")]
    BadLabel { row: usize, label: Class },
    #[error("{rows} rows but {labels} labels")]
    LabelCount { rows: usize, labels: usize },
    #[error("non-finite value at row {row}, feature {feature}")]
    NonFinite { row: usize, feature: usize },
    #[error("{names} feature names but {kinds} feature kinds")]
    KindCount { names: usize, kinds: usize },
}

/// How a feature column was encoded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum FeatureKind {
    Numeric,
    /// Integer codes `0..levels.len()`; `levels[code]` is the raw value.
    Categorical { levels: Vec<String> },
}

/// A fully numeric, imputed, binary-labelled table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    feature_names: Vec<String>,
    feature_kinds: Vec<FeatureKind>,
    rows: Vec<Vec<f64>>,
    labels: Vec<Class>,
}

impl Dataset {
    pub fn new(
        feature_names: Vec<String>,
        feature_kinds: Vec<FeatureKind>,
        rows: Vec<Vec<f64>>,
        labels: Vec<Class>,
    ) -> Result<Self, DatasetError> {
        if feature_names.len() != feature_kinds.len() {
            return Err(DatasetError::KindCount {
                names: feature_names.len(),
                kinds: feature_kinds.len(),
            });
        }
        if rows.len() != labels.len() {
            return Err(DatasetError::LabelCount { rows: rows.len(), labels: labels.len() });
        }
        let d = feature_names.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(DatasetError::RowLength { row: i, got: row.len(), expected: d });
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(DatasetError::NonFinite { row: i, feature: j });
            }
        }
        if let Some(i) = labels.iter().position(|&y| y > 1) {
            return Err(DatasetError::BadLabel { row: i, label: labels[i] });
        }
        Ok(Self { feature_names, feature_kinds, rows, labels })
    }

    /// All-numeric dataset with generated feature names `x0, x1, ...`.
    pub fn from_rows(rows: Vec<Vec<f64>>, labels: Vec<Class>) -> Result<Self, DatasetError> {
        let d = rows.first().map_or(0, Vec::len);
        let names = (0..d).map(|j| format!("x{j}")).collect();
        Self::new(names, vec![FeatureKind::Numeric; d], rows, labels)
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn feature_kinds(&self) -> &[FeatureKind] {
        &self.feature_kinds
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|n| n == name)
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    pub fn labels(&self) -> &[Class] {
        &self.labels
    }

    /// Values of one feature across all rows.
    pub fn column(&self, feature: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[feature]).collect()
    }

    /// New dataset holding the given rows (in order, duplicates allowed).
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            feature_names: self.feature_names.clone(),
            feature_kinds: self.feature_kinds.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    /// Copy with labels replaced. Used to check that fitted objects ignore
    /// held-out labels.
    pub fn with_labels(&self, labels: Vec<Class>) -> Result<Dataset, DatasetError> {
        Dataset::new(
            self.feature_names.clone(),
            self.feature_kinds.clone(),
            self.rows.clone(),
            labels,
        )
    }
}
