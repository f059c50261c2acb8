use alloc::string::String;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A constant has a pole at the requested parameters.
    #[error("pole: {0}")]
    Pole(String),
    /// `q_eps` dropped below `p`.
    #[error("supercritical-order violation: q_eps = {q_eps} < p = {p}")]
    SupercriticalOrder { p: f64, q_eps: f64 },
    /// Evaluation exactly at a singular point.
    #[error("singular evaluation: {0}")]
    Singularity(String),
    /// A declared singularity is not integrable.
    #[error("non-integrable singularity: {0}")]
    Divergence(String),
    /// The integrand returned NaN or an infinity.
    #[error("non-finite integrand value at {0}")]
    NonFinite(String),
    /// The operation needs a different exponent regime.
    #[error("regime mismatch: {0}")]
    Regime(String),
    /// Shooting could not bracket or converge.
    #[error("shooting failure: {0}")]
    Shooting(String),
    /// The ODE step size underflowed.
    #[error("step size underflow at r = {0}")]
    Stiffness(f64),
    /// No zero of the shooting solution before the integration limit.
    #[error("no zero before r = {0}; exponent pair not subcritical enough")]
    NotSubcritical(f64),
    /// The ball solution is not concentrated enough for the comparison.
    #[error("insufficient blow-up: lambda = {0}")]
    InsufficientBlowup(f64),
    /// An internal identity failed beyond its tolerance.
    #[error("consistency check failed: {0}")]
    Consistency(String),
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! domain {
    ($($arg:tt)*) => { $crate::Error::Domain(alloc::format!($($arg)*)) };
}
pub(crate) use domain;
