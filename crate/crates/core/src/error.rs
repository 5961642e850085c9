use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = FusionError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum FusionError {
    #[error("frame must contain at least one class")]
    EmptyFrame,
    #[error("frame supports at most {max} classes, got {got}")]
    TooManyClasses { got: usize, max: usize },
    #[error("class labels must be non-empty")]
    EmptyLabel,
    #[error("duplicate class label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("frame mismatch: expected {expected} classes, found {found}")]
    FrameMismatch { expected: usize, found: usize },
    #[error("class index {index} out of range for a frame of {n} classes")]
    ClassOutOfRange { index: usize, n: usize },
    #[error("invalid score {value} at position {index}: {reason}")]
    InvalidScore {
        index: usize,
        value: f64,
        reason: &'static str,
    },
    #[error("expected a {expected} source output")]
    WrongOutputKind { expected: &'static str },
    #[error("weight matrix has shape {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    WeightShape {
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("absolute majority is defined on raw vote counts, not weighted tallies")]
    WeightedAbsoluteMajority,
    #[error("threshold constant c={0} is outside [0, 1]")]
    ThresholdOutOfRange(f64),
    #[error("{0} must not be empty")]
    Empty(&'static str),
    #[error("invalid mass function: {0}")]
    InvalidMass(String),
    #[error("mass function is totally conflicting (m(∅) = 1)")]
    TotalConflict,
    #[error("normalization factor undefined for source {source_index}: every conditional probability is zero")]
    UndefinedNormalization { source_index: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("no source is ever correct on the calibration data")]
    NoCorrectSource,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("dataset of {0} samples cannot be split into three non-empty parts")]
    TooSmallToSplit(usize),
    #[error("unknown fusion method `{0}`")]
    UnknownMethod(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl FusionError {
    /// True for errors caused by bad input rather than the environment.
    pub fn is_validation(&self) -> bool {
        !matches!(self, FusionError::Io(_))
    }
}
