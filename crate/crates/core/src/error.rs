use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("no labeled articles")]
    NoLabeledArticles,

    #[error("{0}")]
    InvalidInput(String),

    #[error("sample {0} is empty")]
    EmptySample(&'static str),

    #[error("target sub-corpus is empty: {0}")]
    EmptyTarget(String),

    #[error("no reference sample: {0}")]
    NoReference(String),

    #[error("no article carries a {0}")]
    KeyAbsent(&'static str),

    #[error("stage {0} has no articles")]
    EmptyStage(&'static str),

    #[error("no articles match {0:?}")]
    NoMatches(String),

    #[error("duplicate event name {0:?}")]
    DuplicateEvent(String),

    #[error("cluster count {k} out of range 1..={n}")]
    ClusterCount { k: usize, n: usize },

    #[error("cluster {0} has fewer than two events outside it; standard deviation undefined")]
    ComplementTooSmall(usize),

    #[error("training data covers a single frame")]
    SingleClass,

    #[error("smoothing must be positive and finite, got {0}")]
    InvalidSmoothing(f64),

    #[error("malformed model: {0}")]
    Model(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
