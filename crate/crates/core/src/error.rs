use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to load table {path}: {reason}")]
    TableLoad { path: PathBuf, reason: String },

    #[error("empty question")]
    EmptyQuestion,

    #[error("config {name}, line {line}: {reason}")]
    Config {
        name: String,
        line: usize,
        reason: String,
    },

    #[error("plan error: {0}")]
    IncompleteParse(String),

    #[error("table has no dimension column")]
    NoDimensionColumn,

    #[error("no columns to predict over")]
    NoColumns,

    #[error("no training examples")]
    NoTrainingExamples,

    #[error("model file: {0}")]
    ModelFormat(String),

    #[error("dataset: {0}")]
    Dataset(String),

    #[error("unknown split {0:?}")]
    UnknownSplit(String),

    #[error("split {split}: expected {expected} examples, found {found}")]
    SplitCount {
        split: String,
        expected: usize,
        found: usize,
    },

    #[error("model required for abduction mode ml")]
    ModelRequired,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
