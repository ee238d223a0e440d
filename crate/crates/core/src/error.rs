use std::path::PathBuf;

/// Errors produced by the library.
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

    #[error("line {line}, column `{column}`: cannot parse {value:?} as a finite number")]
    Parse {
        line: u64,
        column: String,
        value: String,
    },

    #[error("label column {0} not found in header")]
    MissingLabelColumn(String),

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("expected exactly two distinct labels, found {found}")]
    NotBinary { found: usize },

    #[error("non-finite feature value at row {row}, column {column}")]
    NonFinite { row: usize, column: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("k = {k} is out of range for {rows} rows (need 1 <= k <= {max})", max = rows.saturating_sub(1))]
    KOutOfRange { k: usize, rows: usize },

    #[error("need at least {needed} minority rows, have {have}")]
    TooFewRows { needed: usize, have: usize },

    #[error("invalid split: {0}")]
    InvalidSplit(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(
        "minority entries have zero variance; the default kernel width is undefined, supply sigma explicitly"
    )]
    DegenerateMinority,

    #[error(
        "attempt cap of {attempts} candidates reached with {accepted}/{requested} samples accepted \
         ({skipped} skipped by threshold); tau and sigma are incompatible with this data"
    )]
    AttemptCapReached {
        attempts: usize,
        accepted: usize,
        requested: usize,
        skipped: usize,
    },

    #[error("non-finite loss at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },

    #[error("{0}")]
    Plan(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by bad user-supplied parameters rather than data.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::InvalidConfig(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
