//! CSV ingestion and cross-validation fold plans.

mod config;
mod folds;
mod load;

use thiserror::Error;

pub use config::{DatasetConfig, PredicateOp, PrivilegedPredicate};
pub use folds::{make_folds, make_stratified_folds, FoldPlan};
pub use load::{load_dataset, load_dataset_from_reader};

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("invalid dataset config: {0}")]
    Config(String),
    #[error("column {0:?} not found in header")]
    MissingColumn(String),
    #[error("empty file: no header or no data rows")]
    EmptyFile,
    #[error("line {line}: label value {value:?} is outside the label mapping")]
    LabelOutsideMapping { line: usize, value: String },
    #[error("line {line}: missing label")]
    MissingLabel { line: usize },
    #[error("line {line}: column {column:?} value {value:?} is not numeric")]
    NotNumeric { line: usize, column: String, value: String },
    #[error("column {0:?} has no non-missing values to impute from")]
    AllMissing(String),
    #[error("line {line}: {got} fields, header has {expected}")]
    RowLength { line: usize, got: usize, expected: usize },
    #[error("invalid fold request: {0}")]
    Folds(String),
}
