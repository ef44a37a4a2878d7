use std::path::PathBuf;

use leverage_core::DiagError;
use thiserror::Error;

/// Everything that makes a run exit with status 1. Line and column numbers
/// are 1-based positions in the input file.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("line {line}, column {col}: {message}")]
    Parse { line: u64, col: usize, message: String },
    #[error("line {line}, column {col}: missing value")]
    MissingValue { line: u64, col: usize },
    #[error("duplicate header name {0:?}")]
    DuplicateHeader(String),
    #[error("response column {0:?} not found in header")]
    UnknownResponse(String),
    #[error("column {0:?} is constant")]
    ConstantColumn(String),
    #[error("regressors are collinear: {}", .0.join(", "))]
    Collinear(Vec<String>),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("scenario file {path}: {message}")]
    Scenario { path: PathBuf, message: String },
    #[error(transparent)]
    Diag(#[from] DiagError),
}
