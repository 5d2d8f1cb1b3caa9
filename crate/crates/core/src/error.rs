use std::path::PathBuf;

use thiserror::Error;

use crate::classifier::Feature;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("both strings are empty; dissimilarity is undefined")]
    DegenerateInput,

    #[error("sample has {got} tweets, at least {need} required")]
    InsufficientSample { got: usize, need: usize },

    #[error("text contains no word tokens")]
    EmptyText,

    #[error("vocabulary has {types} word type(s), at least 2 required")]
    DegenerateVocabulary { types: usize },

    #[error("calibration needs at least 2 organic vectors, got {got}")]
    InsufficientTraining { got: usize },

    #[error("feature `{0}` has zero variance among organic training vectors")]
    DegenerateFeature(Feature),

    #[error("feature mask is empty")]
    EmptyMask,

    #[error("validation set contains a single class")]
    SingleClass,

    #[error("fold {fold}: {message}")]
    Fold { fold: usize, message: String },

    #[error("feature mask {requested} does not match the model mask {model}")]
    MaskMismatch { requested: String, model: String },

    #[error("unsupported model version {found} (expected {expected})")]
    ModelVersion { found: u32, expected: u32 },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures caused by degenerate statistics (as opposed to bad input).
    pub fn is_degenerate(&self) -> bool {
        matches!(
            self,
            Error::DegenerateInput
                | Error::InsufficientSample { .. }
                | Error::EmptyText
                | Error::DegenerateVocabulary { .. }
                | Error::InsufficientTraining { .. }
                | Error::DegenerateFeature(_)
                | Error::SingleClass
                | Error::Fold { .. }
        )
    }
}
