use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the embedding pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("invalid input: {0}")]
    Input(String),
    #[error("negative label {label} at offset {offset}")]
    NegativeLabel { offset: usize, label: i64 },
    #[error("layout failed: {0}")]
    Layout(String),
    #[error("routing failed: {0}")]
    Routing(String),
    #[error("grid of {width}x{height} cells exceeds the {limit}x{limit} limit")]
    GridTooLarge {
        width: usize,
        height: usize,
        limit: usize,
    },
    #[error("all {0} candidate embeddings failed")]
    NoCandidate(usize),
    #[error("unknown segment {0}")]
    UnknownSegment(i64),
    #[error("pair ({0}, {1}) is not an edge of the segmentation graph")]
    NotAnEdge(usize, usize),
    #[error("palette has no color for label {0}")]
    MissingColor(i32),
    #[error("image encoding failed: {0}")]
    Encode(String),
    #[error("stage {stage} failed")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
