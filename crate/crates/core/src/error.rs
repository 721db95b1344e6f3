use thiserror::Error;

/// Errors raised by the analytic layer.
///
/// Numeric diagnostics are carried as `f64` regardless of the scalar type
/// the computation ran in.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("{what} = {value} outside domain [{lower}, {upper}]")]
    Domain {
        what: &'static str,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("sign function has {} crossing roots for h = {h} (at most two expected): {roots:?}", roots.len())]
    AssumptionViolated { h: f64, roots: Vec<f64> },

    #[error("could not bracket {what} on [{lower}, {upper}] (residuals {f_lower}, {f_upper})")]
    NoBracket {
        what: &'static str,
        lower: f64,
        upper: f64,
        f_lower: f64,
        f_upper: f64,
    },

    #[error("boundary solution for h = {h} failed verification: {reason} (x1 = {x1}, x2 = {x2}, worst = {worst})")]
    VerificationFailed {
        h: f64,
        x1: f64,
        x2: f64,
        reason: &'static str,
        worst: f64,
    },

    #[error("quadrature on [{lower}, {upper}] did not converge (estimate {estimate}, error {error})")]
    Quadrature {
        lower: f64,
        upper: f64,
        estimate: f64,
        error: f64,
    },

    #[error("integral over the half-line diverges: exponent {exponent} must be < -1")]
    DivergentIntegral { exponent: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(&'static str),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
