use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Exact arithmetic was asked for a momentum above the configured cap.
    #[error("angular momentum {momentum} exceeds the exact-mode capacity cap {cap}")]
    Capacity { momentum: u32, cap: u32 },

    #[error("invalid projection: |m| = {m} exceeds l = {l}")]
    InvalidProjection { l: u32, m: i32 },

    #[error("unsupported Hermite/coupling order q = {0} (supported: 2, 3)")]
    UnsupportedOrder(usize),

    /// Parameters outside the power-exponential class.
    #[error("invalid class-D parameters: {0}")]
    InvalidClassD(String),

    #[error("spectrum has zero total variance")]
    ZeroSpectrum,

    #[error("malformed coefficients: {0}")]
    MalformedCoefficients(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("trispectrum has nonzero entry at odd L = {0}")]
    OddSupport(usize),

    #[error("insufficient sample size: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// `true` for errors caused by bad user input, as opposed to runtime or
    /// capacity failures.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Capacity { .. } | Error::Io(_))
    }
}
