use thiserror::Error;

use crate::numerics::NumericsError;

/// Errors raised by the Bayes factor, power and sample size routines.
///
/// Numeric payloads are stored as `f64` regardless of the scalar type the
/// computation ran in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Numerics(#[from] NumericsError),

    /// `limit` is the limiting power, or for the Lambert-W approximation the
    /// smallest target inside its domain.
    #[error("target power {target} is unattainable: {reason}")]
    Infeasible { target: f64, limit: f64, reason: String },

    #[error("success region has {found} boundary crossings, at most two are supported")]
    TooManyCrossings { found: usize },

    #[error(
        "power is not increasing over the search range (power({n_lo}) = {power_lo} > power({n_hi}) = {power_hi}); check the threshold orientation"
    )]
    NonMonotone {
        n_lo: f64,
        n_hi: f64,
        power_lo: f64,
        power_hi: f64,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
