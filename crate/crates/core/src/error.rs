use thiserror::Error;

/// Errors raised by the estimation pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("sample size n = {n} too small: {reason}")]
    SampleTooSmall { n: usize, reason: String },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unsupported moment order {0} (expected one of 2, 4, 6, 8, 10, 12)")]
    UnsupportedMomentOrder(u32),

    #[error("unknown coefficient function `{0}`")]
    UnknownCoefficient(String),

    #[error("unknown noise kind `{0}`")]
    UnknownNoise(String),

    #[error("noise record unavailable: diagnostics need the simulated innovations")]
    MissingNoise,

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("basis is not orthonormal on the grid (d = {d}, max Gram deviation {deviation:e})")]
    NotOrthonormal { d: usize, deviation: f64 },

    #[error("empty weight family")]
    EmptyFamily,

    #[error("query point {t} outside [{a}, {b}]")]
    OutOfDomain { t: f64, a: f64, b: f64 },

    #[error("empty index range {m0}..{m1}")]
    EmptyRange { m0: usize, m1: usize },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
