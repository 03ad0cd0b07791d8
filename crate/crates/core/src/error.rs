use thiserror::Error;

/// Failures reported by the bound computations, the geometry helpers and the
/// code lab.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is outside the domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo:e}, f(hi) = {f_hi:e}")]
    NoBracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },
    #[error("theta = {theta} is below 1/n = {min}, outside the asymptotic accuracy regime")]
    AccuracyRegime { theta: f64, min: f64 },
    #[error("cardinality bound is vacuous: mu = {mu} >= 1")]
    Vacuous { mu: f64 },
    #[error("cardinality bound overflows u128 (ln bound = {log_value})")]
    Overflow { log_value: f64 },
    #[error("spectrum envelope has empty support")]
    EmptySupport,
    #[error("invalid code parameters: {0}")]
    InvalidCode(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(name: &'static str, value: f64, domain: &'static str) -> Error {
    Error::Domain { name, value, domain }
}
