use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("operation requires a {expected} black hole, got {got}")]
    KindMismatch { expected: String, got: String },
    #[error("spectrum has {got} sectors, expected {expected}")]
    SpectrumLength { expected: usize, got: usize },
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("numerical guard tripped: {0}")]
    NumericalGuard(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
