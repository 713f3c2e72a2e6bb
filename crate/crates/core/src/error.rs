use std::path::PathBuf;

/// Errors raised anywhere in the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid range: i = {i} exceeds ell = {ell}")]
    InvalidRange { i: u64, ell: u64 },
    #[error("negative radicand")]
    NegativeRadicand,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("context inapplicable: {0}")]
    ContextInapplicable(String),
    #[error("CB inapplicable: {0}")]
    CbInapplicable(String),
    #[error("malformed row {row}: {reason}")]
    MalformedRow { row: usize, reason: String },
    #[error("invalid parameter row {0}")]
    InvalidParameterRow(usize),
    #[error("out of family range: {0}")]
    OutOfFamilyRange(String),
    #[error("field unavailable: q = {0} is not prime and no field table was supplied")]
    FieldUnavailable(u64),
    #[error("invalid field table: {0}")]
    InvalidFieldTable(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("closed form out of range: {0}")]
    ClosedFormOutOfRange(String),
    #[error("family inapplicable: {0}")]
    FamilyInapplicable(String),
    #[error("context/covering mismatch: {0}")]
    ContextMismatch(String),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("malformed table: {0}")]
    MalformedTable(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
