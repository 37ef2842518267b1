//! Error type shared across the toolkit.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid signal size {0}: must be a multiple of 3 and at least 6")]
    InvalidSize(usize),
    #[error("wavelet operator failed its orthonormality self-check (residual {0:.3e})")]
    OrthonormalityFailure(f64),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("degenerate range: matrix is constant, no data-sensitive bound is definable")]
    DegenerateRange,
    #[error("embedding intensity {0} exceeds 2/sqrt(3)-1 in real-output mode")]
    DeltaOutOfRange(f64),
    #[error("embedding intensity is zero: extraction is undefined")]
    ZeroDelta,
    #[error("inverse-trig argument {0} outside [-1, 1]: selectors or delta do not match")]
    ArgumentOutOfDomain(f64),
    #[error("noise trace is not available; rerun the mechanism with trace retention")]
    MissingTrace,
    #[error("{0} selector entries exceed the enumeration bound of {1}")]
    TooLarge(usize, usize),
    #[error("labels must be 0 or 1 (found {0})")]
    NonBinaryLabels(f64),
    #[error("training diverged: cost became non-finite at epoch {0}")]
    Divergence(usize),
    #[error("dataset has {have} rows but {need} are required")]
    InsufficientData { have: usize, need: usize },
    #[error("parse error at row {row}, column {col}: {msg}")]
    ParseError { row: usize, col: usize, msg: String },
    #[error("non-numeric cell at row {row}, column {col}: {value:?}")]
    NonNumericCell {
        row: usize,
        col: usize,
        value: String,
    },
    #[error("ragged row {row}: expected {expected} fields, found {found}")]
    RaggedRows {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 1 usage, 2 parse, 3 shape/degenerate
    /// data, 4 numeric divergence, 5 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 1,
            Error::ParseError { .. }
            | Error::NonNumericCell { .. }
            | Error::RaggedRows { .. }
            | Error::UnsupportedFormat(_) => 2,
            Error::InvalidSize(_)
            | Error::ShapeMismatch(_)
            | Error::DegenerateRange
            | Error::DeltaOutOfRange(_)
            | Error::ZeroDelta
            | Error::MissingTrace
            | Error::TooLarge(..)
            | Error::NonBinaryLabels(_)
            | Error::InsufficientData { .. } => 3,
            Error::OrthonormalityFailure(_)
            | Error::ArgumentOutOfDomain(_)
            | Error::Divergence(_) => 4,
            Error::Io(_) => 5,
        }
    }
}
