use std::path::PathBuf;

/// Errors raised by the classifier library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("row {row}, column {column:?}: cannot parse {value:?} as a number")]
    Parse { row: usize, column: String, value: String },

    #[error("row {row}, column {column:?}: missing value")]
    MissingValue { row: usize, column: String },

    #[error("row {row}: expected {expected} fields, found {found}")]
    RaggedRow { row: usize, expected: usize, found: usize },

    #[error("label column {0} not found in header")]
    LabelColumnNotFound(String),

    #[error("label column must hold two classes, found {} distinct values: {values:?}", values.len())]
    LabelCardinality { values: Vec<String> },

    #[error("positive label {label:?} is not one of the label values {values:?}")]
    UnknownPositiveLabel { label: String, values: Vec<String> },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("need at least {needed} candidate rows, only {available} available")]
    NotEnoughCandidates { needed: usize, available: usize },

    #[error("could not draw a training partition holding both classes after {attempts} attempts")]
    DegenerateSplit { attempts: usize },

    #[error("probability {value} at position {index} is outside [0, 1]")]
    ProbabilityOutOfRange { index: usize, value: f64 },

    #[error("model file, line {line}: {message}")]
    ModelFormat { line: usize, message: String },

    #[error("model was fitted on dataset {expected}, got {found}")]
    DigestMismatch { expected: String, found: String },
}

pub type Result<T> = std::result::Result<T, Error>;
