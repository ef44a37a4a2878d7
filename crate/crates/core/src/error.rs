use thiserror::Error;

/// Errors raised by the diagnostics kernel.
///
/// Indices are 0-based positions in the column order of the input that was
/// handed to the failing routine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiagError {
    #[error("need at least 2 rows, got {0}")]
    TooFewRows(usize),
    #[error("need at least 1 regressor column")]
    NoColumns,
    #[error("matrix has {got} values, expected {rows}x{cols}")]
    Shape { rows: usize, cols: usize, got: usize },
    #[error("{expected} column names expected, got {got}")]
    NameCount { expected: usize, got: usize },
    #[error("duplicate column name {0:?}")]
    DuplicateColumnName(String),
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("column {0} has zero variance")]
    ConstantColumn(usize),
    #[error("covariance is not positive definite (pivot {pivot} collapsed)")]
    NotPositiveDefinite { pivot: usize },
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("auxiliary regression needs at least 2 regressors")]
    SingleRegressor,
    #[error("bad scenario: {0}")]
    BadSpec(String),
}

pub type Result<T, E = DiagError> = std::result::Result<T, E>;

pub(crate) fn check_index(index: usize, len: usize) -> Result<()> {
    if index < len {
        Ok(())
    } else {
        Err(DiagError::IndexOutOfRange { index, len })
    }
}
