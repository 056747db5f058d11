//! Special functions and solvers shared by the rest of the crate.
//!
//! Everything here is a pure function of its arguments and generic over
//! [`Scalar`](crate::Scalar). Densities are evaluated in log space and only
//! exponentiated by the caller.

mod gamma;
mod lambert;
mod normal;
mod quad;
mod root;
mod t;

use thiserror::Error;

pub use gamma::{ln_gamma, regularized_beta};
pub use lambert::{lambert_w, lambert_w0_exp, Branch};
pub use normal::{
    ln_std_normal_pdf, std_normal_cdf, std_normal_pdf, std_normal_quantile, std_normal_sf,
};
pub use quad::{integrate, integrate_with, Integral, Tolerance};
pub use root::{find_root, find_root_bracket, Bracket};
pub use t::{
    ln_nct_density, ln_t_density, nct_density, student_t_cdf, student_t_sf, t_density,
    TruncatedTDensity,
};

/// Default relative tolerance for adaptive quadrature.
pub const DEFAULT_REL_TOL: f64 = 1e-8;

/// Default tolerance for bracketed root finding.
pub const DEFAULT_ROOT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("argument outside the domain of {function}: {detail}")]
    Domain {
        function: &'static str,
        detail: String,
    },

    #[error("quadrature did not converge (estimate {estimate}, error estimate {error})")]
    NoConvergence { estimate: f64, error: f64 },

    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("truncation interval [{lower}, {upper}] carries no probability mass")]
    DegenerateTruncation { lower: f64, upper: f64 },
}

pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> NumericsError {
    NumericsError::Domain {
        function,
        detail: detail.into(),
    }
}
