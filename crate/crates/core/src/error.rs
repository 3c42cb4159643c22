use thiserror::Error;

/// Errors produced by ingestion, solvers and the evaluation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("missing value at year {year}, unit {unit:?}")]
    MissingCell { year: i32, unit: String },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("parse error at row {row}, column {col}: {message}")]
    Parse {
        row: usize,
        col: usize,
        message: String,
    },

    #[error("nonpositive value {value} at year {year}, unit {unit:?}, column {column:?}")]
    Domain {
        year: i32,
        unit: String,
        column: String,
        value: f64,
    },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("insufficient pre-intervention period: {have} years, need at least {need}")]
    InsufficientPrePeriod { have: usize, need: usize },

    #[error("rank-deficient design over controls {controls:?}")]
    Rank { controls: Vec<String> },

    #[error("control-group selection failed: {0}")]
    Selection(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures of the method itself (selection, feasibility, too
    /// short a pre-period) as opposed to bad input or I/O.
    pub fn is_method_error(&self) -> bool {
        matches!(
            self,
            Error::InsufficientPrePeriod { .. } | Error::Rank { .. } | Error::Selection(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
