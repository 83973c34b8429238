use thiserror::Error;

/// Errors raised by the solvers and their I/O surface.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("unsupported shape: {0}")]
    Unsupported(String),

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    /// Validation and parse failures are caller mistakes; everything else is
    /// a solver-side failure.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Validation(_) | Error::Parse { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
