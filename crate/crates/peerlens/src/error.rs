use crate::types::AsnId;

/// Crate-wide error type. Variants carry enough context to point at the
/// offending input (line numbers, ASNs, column names) without holding
/// references into it.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("{file} line {line}: {msg}")]
    Parse {
        file: String,
        line: usize,
        msg: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown ASN {0}")]
    UnknownAsn(AsnId),

    #[error("self pair ({0}, {0}) is not a valid AS pair")]
    SelfPair(AsnId),

    #[error("common point-of-presence count {common} exceeds min(|P1|, |P2|) = min({p1}, {p2})")]
    CommonPopsExceedSets { p1: u64, p2: u64, common: u64 },

    #[error("no point-of-presence information available: {0}")]
    NoPopSource(String),

    #[error("snapshot mismatch: {0}")]
    SnapshotMismatch(String),

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("model format: {0}")]
    ModelFormat(String),

    #[error("training data: {0}")]
    TrainingData(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Wraps an io::Error with the path that produced it; bare io::Error
    /// messages ("No such file or directory") are useless in a pipeline
    /// that touches dozens of files.
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// Stable machine-readable tag for each variant, used by the CLI to
    /// emit structured errors.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptyInput(_) => "empty_input",
            Error::Parse { .. } => "parse",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::UnknownAsn(_) => "unknown_asn",
            Error::SelfPair(_) => "self_pair",
            Error::CommonPopsExceedSets { .. } => "common_pops_exceed_sets",
            Error::NoPopSource(_) => "no_pop_source",
            Error::SnapshotMismatch(_) => "snapshot_mismatch",
            Error::SchemaMismatch(_) => "schema_mismatch",
            Error::ModelFormat(_) => "model_format",
            Error::TrainingData(_) => "training_data",
            Error::Io { .. } => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}
