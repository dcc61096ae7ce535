use std::path::PathBuf;

/// Errors produced by the corpus and evaluation routines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {field}: {message}")]
    Record {
        line: usize,
        field: String,
        message: String,
    },

    #[error("duplicate triplet id `{0}`")]
    DuplicateId(String),

    #[error("triplet `{id}`: {field} contains a character TSV cannot encode")]
    TsvUnencodable { id: String, field: &'static str },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("zero denominator while computing {0}")]
    ZeroDenominator(&'static str),

    #[error("requested {requested} items but only {available} are available")]
    SizeTooLarge { requested: usize, available: usize },

    #[error("agreement undefined: {0}")]
    UndefinedAgreement(&'static str),

    #[error("oracle limits exceeded: {0}")]
    OracleLimit(String),

    #[error("{0}")]
    Invalid(String),

    #[error("malformed rows at lines {}", .0.iter().map(|(l, m)| format!("{l} ({m})")).collect::<Vec<_>>().join(", "))]
    MalformedRows(Vec<(usize, String)>),

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

    pub(crate) fn record(line: usize, field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Record {
            line,
            field: field.into(),
            message: message.into(),
        }
    }
}
