//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the msvm library.
#[derive(Debug, Error)]
pub enum Error {
    /// Two operands (or an operand and an expectation) disagree on shape.
    #[error("dimension mismatch in {op}: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    Dimension {
        op: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    /// A scalar parameter is outside its valid range.
    #[error("invalid parameter {name}: {value} ({requirement})")]
    Parameter {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    /// A label column holds a single class; the dual is degenerate for it.
    #[error("label column {column} contains a single class; drop it or supply both classes")]
    DegenerateLabelColumn { column: usize },

    /// A numeric quantity became non-finite during iteration.
    #[error("non-finite value in {what} at iteration {iteration}")]
    Numeric {
        what: &'static str,
        iteration: usize,
    },

    /// A metric is undefined for the given inputs.
    #[error("undefined metric: {0}")]
    UndefinedMetric(&'static str),

    /// The operation does not apply to this model kind.
    #[error("unsupported operation: {0}")]
    Unsupported(&'static str),

    /// A cell of an input file failed to parse.
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    /// A dataset or manifest is structurally invalid.
    #[error("invalid data in {path}: {message}")]
    Data { path: String, message: String },

    /// An experiment configuration is invalid.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A model file is corrupt or has an unsupported layout.
    #[error("invalid model file: {0}")]
    Model(String),

    /// An error raised inside one cross-validation fold.
    #[error("fold {fold}: {source}")]
    Fold {
        fold: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn dimension(op: &'static str, left: (usize, usize), right: (usize, usize)) -> Self {
        Error::Dimension {
            op,
            left_rows: left.0,
            left_cols: left.1,
            right_rows: right.0,
            right_cols: right.1,
        }
    }
}
