use thiserror::Error;

/// Errors raised by the noise models and their numerical kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument violates an operation's precondition.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A query falls outside the support of a sampled curve.
    #[error("out of range: {0}")]
    Range(String),

    /// Input data is inconsistent (channel ordering, monotonicity, parsing).
    #[error("data error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Data { line: Option<usize>, message: String },

    /// A value outside the mathematical domain of a conversion.
    #[error("domain error: {0}")]
    Domain(String),

    /// An integration produced a non-finite intermediate.
    #[error("numerical failure at z = {z:.6e} m: {message}")]
    Numerical { z: f64, message: String },
}

impl Error {
    pub fn data(message: impl Into<String>) -> Self {
        Error::Data { line: None, message: message.into() }
    }

    pub fn data_at(line: usize, message: impl Into<String>) -> Self {
        Error::Data { line: Some(line), message: message.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
