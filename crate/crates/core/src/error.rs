use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "grid of {m} points aliases a polynomial with frequency cap {lambda} (need m > 2*lambda)"
    )]
    AliasingRisk { m: usize, lambda: u64 },

    #[error("empty band: cutoff {cutoff} exceeds frequency cap {lambda}")]
    EmptyBand { cutoff: u64, lambda: u64 },

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error(
        "insufficient resolution: n_max = {n_max} but ell = {ell:e} needs n_max >= {required}"
    )]
    InsufficientResolution { n_max: u64, ell: f64, required: u64 },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("s = {s} is outside the validity range for p = {p} (need s > {threshold})")]
    OutOfValidity { s: f64, p: f64, threshold: f64 },

    #[error("insufficient data: need at least {needed} points, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("insufficient range: {0}")]
    InsufficientRange(String),

    #[error("oracle refused: n_max = {n_max} exceeds cap {cap}")]
    OracleCap { n_max: u64, cap: u64 },
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
