use std::path::PathBuf;
use thiserror::Error;

/// Errors produced by this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },

    #[error("vector has no nonzero entries")]
    EmptyVector,

    #[error("document has no in-vocabulary tokens")]
    EmptyFeature,

    #[error("clustering needs at least 2 points, got {0}")]
    TooSmall(usize),

    #[error("cluster count must be a power of two in [1, {labels}], got {k}")]
    BadK { k: usize, labels: usize },

    #[error("bad input: {0}")]
    BadInput(String),

    #[error("{path}: line {line}: {reason}")]
    BadScoreFile {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("ensemble members cover different instance sets ({0} vs {1} instances)")]
    EnsembleMismatch(usize, usize),

    #[error("dataset is empty: {0}")]
    EmptyDataset(PathBuf),

    #[error("{path}: line {line}: {reason}")]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("model does not match its companion artifacts: {0}")]
    ModelMismatch(String),

    #[error("stage {stage} failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Wrap an error with the pipeline stage it occurred in.
    pub fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
