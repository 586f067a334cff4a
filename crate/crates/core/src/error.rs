use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(String),

    /// A cell that could not be interpreted. Rows are 1-based data rows (header excluded).
    #[error("row {row}, column '{column}': {message}")]
    Cell {
        row: usize,
        column: String,
        message: String,
    },

    #[error("unknown column '{0}'")]
    UnknownColumn(String),

    #[error("fewer than two classes")]
    FewerThanTwoClasses,

    #[error("invalid data: {0}")]
    Data(String),

    #[error("no signal: every feature was dropped during binarization")]
    NoSignal,

    #[error("invalid split: {0}")]
    Split(String),

    #[error("invalid hyperparameters: {0}")]
    HyperParams(String),

    #[error("dimension mismatch: expected {expected} features, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("leaf {0} has no label")]
    UnlabeledLeaf(usize),

    #[error("invalid tree: {0}")]
    Tree(String),

    #[error("line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("objective not supported here: {0}")]
    Objective(String),

    #[error("unknown variable '{0}'")]
    UnknownVariable(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("non-integral binary: {0}")]
    NonIntegral(String),

    #[error("search space too large: {0} candidate trees")]
    SpaceTooLarge(u128),

    #[error("degenerate evaluation: {0}")]
    Degenerate(String),

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            line,
            message: message.into(),
        }
    }
}
