use thiserror::Error;

/// Errors raised by the cyclewalk library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("step law is not strongly aperiodic (support differences have gcd {gcd})")]
    AperiodicityViolated { gcd: u64 },
    #[error("custom table is not symmetric at k = {k}")]
    NotSymmetric { k: i64 },
    #[error("custom table mass {total} differs from 1")]
    NotNormalized { total: f64 },
    #[error("custom laws have no closed-form spectral profile")]
    NoClosedForm,
    #[error("embedding modulus {required} exceeds the limit {limit}")]
    ModulusOverflow { required: u64, limit: u64 },
    #[error("quadrature did not reach tolerance {tol:e} (estimated error {estimate:e})")]
    QuadratureNonConvergence { tol: f64, estimate: f64 },
    #[error("round-off drift {drift:e} in probability vector is too large to renormalize")]
    NumericalDrift { drift: f64 },
    #[error("trajectory step {index} moves by {step}, hunter steps must lie in {{-1, 0, 1}}")]
    LipschitzViolation { index: usize, step: i64 },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

pub type Result<T> = std::result::Result<T, Error>;
