use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("header must end with a column named \"label\"")]
    MissingLabelColumn,

    #[error("no usable rows after dropping {dropped} incomplete rows")]
    NoRows { dropped: usize },

    #[error("line {line}: label {value:?} is not 0 or 1")]
    BadLabel { line: usize, value: String },

    #[error("row {row} has {found} values, expected {expected}")]
    RowWidth {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("row {row} contains a non-finite value")]
    NonFinite { row: usize },

    #[error("table must contain both decision classes")]
    SingleClass,

    #[error("invalid split: {0}")]
    InvalidSplit(String),

    #[error("cut set has {found} attributes, table has {expected}")]
    AttributeMismatch { expected: usize, found: usize },

    #[error("attribute {attribute}: bin {bin} out of range (bin count {bins})")]
    BinOutOfRange {
        attribute: usize,
        bin: usize,
        bins: usize,
    },

    #[error("attribute index {0} out of range")]
    NoSuchAttribute(usize),

    #[error("empty attribute set")]
    EmptyAttributes,

    #[error("empty table")]
    EmptyTable,

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
