//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by sampling, metrics, experiments, and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("sample has {n} point(s); at least {required} are required")]
    SampleTooSmall { n: usize, required: usize },

    #[error("index {index} is out of range for a sample of {n} point(s)")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("neighbor rank {rank} is out of range; must satisfy 1 <= rank <= {max}")]
    RankOutOfRange { rank: usize, max: usize },

    #[error("batch count must be at least 1")]
    InvalidCount,

    #[error("point dimension {got} does not match sample dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operation requires a 1-D sample, got dimension {dim}")]
    NotOneDimensional { dim: usize },

    #[error("coordinate at flat index {index} is not finite")]
    NonFiniteCoordinate { index: usize },

    #[error("sample is empty")]
    EmptySample,

    #[error("degenerate support: {reason}")]
    DegenerateSupport { reason: String },

    #[error("domain error: {reason}")]
    DomainError { reason: String },

    #[error("invalid distribution parameters: {reason}")]
    InvalidDistribution { reason: String },

    #[error("degenerate range: min equals max ({value})")]
    DegenerateRange { value: f64 },

    #[error("file not found: {path}")]
    FileNotFound { path: String },

    #[error("column {column:?} not found; available columns: {available:?}")]
    ColumnNotFound {
        column: String,
        available: Vec<String>,
    },

    #[error("parse error at data row {row}: {reason}")]
    ParseError { row: usize, reason: String },

    #[error("no usable values remain after cleaning ({dropped} row(s) dropped)")]
    EmptyAfterCleaning { dropped: usize },

    #[error("insufficient data: need {needed} value(s), have {available}")]
    InsufficientData { needed: usize, available: usize },

    #[error("invalid configuration:\n{}", format_field_errors(.errors))]
    InvalidConfig { errors: Vec<FieldError> },

    #[error("invalid plot spec: {reason}")]
    InvalidPlotSpec { reason: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// A single validation failure, tied to the config field that caused it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl FieldError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        FieldError {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl std::fmt::Display for FieldError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

fn format_field_errors(errors: &[FieldError]) -> String {
    errors
        .iter()
        .map(|e| format!("  - {e}"))
        .collect::<Vec<_>>()
        .join("\n")
}

impl Error {
    /// Convenience constructor for a single-field config error.
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidConfig {
            errors: vec![FieldError::new(field, message)],
        }
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
