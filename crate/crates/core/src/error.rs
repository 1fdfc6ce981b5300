use thiserror::Error;

/// Errors surfaced by the library. Decoding failures are *values*
/// (`DecodeOutcome`, `BmOutcome`, session results), not errors.
#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("decoding rate {rate} below design range (minimum 0.1)")]
    RateOutOfRange { rate: f64 },
    #[error("inverse of zero in GF(2^m)")]
    ZeroInverse,
    #[error("insufficient weight-spectrum depth: need {needed}, have {available}")]
    SpectrumDepth { needed: usize, available: usize },
    #[error("spec file: {0}")]
    SpecFile(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
