use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    Shape {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("invalid state: {0}")]
    State(String),

    #[error("{}:{line}: {message}", path.display())]
    Ingest {
        path: PathBuf,
        /// 1-based; 0 when the problem concerns the file or directory as a whole.
        line: usize,
        message: String,
    },

    #[error("metric undefined: {0}")]
    MetricUndefined(String),

    #[error("checkpoint field `{field}`: {message}")]
    Checkpoint { field: String, message: String },

    #[error("fold {fold}: {source}")]
    Fold {
        fold: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn ingest(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Ingest {
            path: path.into(),
            line,
            message: msg.into(),
        }
    }

    pub(crate) fn checkpoint(field: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Checkpoint {
            field: field.into(),
            message: msg.into(),
        }
    }
}
