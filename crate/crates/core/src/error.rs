use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the scoring pipeline and its data plumbing.
#[derive(Debug, Error)]
pub enum MvcsError {
    #[error("missing file: {}", .0.display())]
    MissingFile(PathBuf),

    #[error("malformed manifest: {0}")]
    MalformedManifest(String),

    #[error("malformed view file {}: {msg}", .path.display())]
    MalformedView { path: PathBuf, msg: String },

    #[error("row count mismatch: view '{view}' has {found} rows, expected {expected}")]
    RowCountMismatch {
        view: String,
        expected: usize,
        found: usize,
    },

    #[error("non-finite value in view '{view}' at row {row}, col {col}")]
    NonFiniteValue {
        view: String,
        row: usize,
        col: usize,
    },

    #[error("invalid labels: {0}")]
    InvalidLabels(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("dataset has no views")]
    EmptyDataset,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("k = {k} must be smaller than the number of instances N = {n}")]
    KTooLarge { k: usize, n: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("operation requires at least two views, dataset has {0}")]
    SingleView(usize),

    #[error("could not bracket the critical bandwidth (upper bound reached {h_hi:e})")]
    BracketFailure { h_hi: f64 },

    #[error("invalid Hopkins probe count m = {m} for N = {n} (need 1 <= m <= N)")]
    MTooLarge { m: usize, n: usize },

    #[error("operation requires class labels but the dataset has none")]
    MissingLabels,

    #[error("cannot reassign instances to a different class: {0}")]
    DerangementImpossible(String),

    #[error("invalid view selection: {0}")]
    InvalidSelection(String),

    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),

    #[error("i/o error on {}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, MvcsError>;
