use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("order 2ν = {0} is even; ν must be a half-odd integer")]
    EvenOrder(i32),
    #[error("cannot parse order {0:?}; expected a form like 9/2")]
    BadOrder(String),
    #[error("invalid angular momentum pair l = {l}, m = {m}")]
    BadAngular { l: i32, m: i32 },
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("oscillation frequency v is zero; the sine factor vanishes identically")]
    DegenerateFrequency,
    #[error("non-finite quadrature term at index n = {n}")]
    NonFiniteTerm { n: i64 },
    #[error("truncation did not occur within |n| ≤ {limit}")]
    NoTruncation { limit: i64 },
    #[error("adaptive quadrature did not reach the requested accuracy (best estimate {estimate:e}, error estimate {error:e})")]
    AccuracyNotReached { estimate: f64, error: f64 },
    #[error("series acceleration did not converge after {panels} panels (best estimate {estimate:e})")]
    TailNotConverged { panels: usize, estimate: f64 },
    #[error("index tuple violates the summation rules: {0}")]
    IndexRange(String),
}
