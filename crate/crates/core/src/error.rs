use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("duplicate article id `{0}`")]
    DuplicateId(String),

    #[error("article `{id}` published {date} is outside the window {start}..={end}")]
    OutsideWindow {
        id: String,
        date: chrono::NaiveDate,
        start: chrono::NaiveDate,
        end: chrono::NaiveDate,
    },

    #[error("article `{0}` has no leaning label")]
    Unlabeled(String),

    #[error("class {0} has no articles")]
    EmptyClass(crate::Leaning),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed dependency tree: {0}")]
    Tree(#[from] crate::tree::TreeError),

    #[error("article `{article}`, sentence {sentence}: {source}")]
    SentenceTree {
        article: String,
        sentence: usize,
        #[source]
        source: crate::tree::TreeError,
    },

    #[error("substitution out of range: sentence {sentence}, token {token}")]
    SubstitutionRange { sentence: usize, token: usize },

    #[error("invalid substitution at sentence {sentence}, token {token}: {reason}")]
    Substitution {
        sentence: usize,
        token: usize,
        reason: String,
    },

    #[error("no stance values to index: every class stance map is empty")]
    EmptySpace,

    #[error("model format version {found}, expected {expected}")]
    VersionMismatch { found: u32, expected: u32 },

    #[error("inconsistent model: {0}")]
    Model(String),

    #[error("unclassifiable: projected vector is all zero")]
    ZeroVector,

    #[error("vector length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("missing predictions for {} article(s): {}", .0.len(), .0.join(", "))]
    MissingPredictions(Vec<String>),

    #[error("no article `{0}` for prediction")]
    UnknownArticle(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// Stable machine-readable name for the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io { source, .. } if source.kind() == std::io::ErrorKind::NotFound => {
                "missing_input"
            }
            Error::Io { .. } => "io",
            Error::Parse { .. } | Error::Json(_) => "parse",
            Error::DuplicateId(_) => "duplicate_id",
            Error::OutsideWindow { .. } => "outside_window",
            Error::Unlabeled(_) => "unlabeled",
            Error::EmptyClass(_) => "empty_class",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::Tree(_) | Error::SentenceTree { .. } => "malformed_tree",
            Error::SubstitutionRange { .. } | Error::Substitution { .. } => "substitution",
            Error::EmptySpace => "empty_space",
            Error::VersionMismatch { .. } => "version_mismatch",
            Error::Model(_) | Error::LengthMismatch(..) => "model",
            Error::ZeroVector => "unclassifiable",
            Error::MissingPredictions(_) => "missing_predictions",
            Error::UnknownArticle(_) => "unknown_article",
        }
    }
}
