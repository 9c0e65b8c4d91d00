use std::io;

use thiserror::Error;

use crate::collector::codec::CodecError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    // Row and column positions are 1-based; CSV rows count the header as row 1.
    #[error("empty dataset")]
    EmptyDataset,

    #[error("malformed header: {0}")]
    MalformedHeader(String),

    #[error("row {row}, column {column}: cannot parse {value:?} as a finite number")]
    NonNumeric {
        row: usize,
        column: usize,
        value: String,
    },

    #[error("row {row}, column {column}: unknown class label {value:?}")]
    UnknownLabel {
        row: usize,
        column: usize,
        value: String,
    },

    #[error("row {row}: expected {expected} fields, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("unknown attribute {0:?}")]
    UnknownAttribute(String),

    #[error("duplicate attribute {0:?}")]
    DuplicateAttribute(String),

    #[error("schema mismatch: model expects {expected} values, got {found}")]
    SchemaMismatch { expected: usize, found: usize },

    #[error("non-finite input value at position {0}")]
    NonFinite(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported model format version {0}")]
    UnsupportedFormat(u32),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] io::Error),

    #[error("snmp timeout after {attempts} attempt(s)")]
    Timeout { attempts: u32 },

    #[error("snmp agent returned error-status {status} (index {index})")]
    ErrorStatus { status: i64, index: i64 },

    #[error("missing varbind for {0}")]
    MissingVarbind(String),

    #[error("snmp codec: {0}")]
    Codec(#[from] CodecError),

    #[error("network: {0}")]
    Network(io::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for failures talking to an SNMP agent.
    pub fn is_network(&self) -> bool {
        matches!(
            self,
            Error::Timeout { .. }
                | Error::ErrorStatus { .. }
                | Error::MissingVarbind(_)
                | Error::Codec(_)
                | Error::Network(_)
        )
    }
}
