use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter violates its precondition (non-positive rate, `n = 0`, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The query point lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative or quadrature routine did not reach its tolerance.
    /// `estimate` is the best value obtained.
    #[error("numerical error: {message} (best estimate {estimate:e})")]
    Numerical { message: String, estimate: f64 },

    /// The modified Bessel function overflows `f64`; `scaled` holds
    /// `I_ν(x)·e^{-x}`.
    #[error("I_{nu}({x}) overflows f64 (scaled value {scaled:e})")]
    BesselOverflow { nu: f64, x: f64, scaled: f64 },

    /// Observed positions are incompatible with the stated speed.
    #[error("inconsistent input: {0}")]
    InconsistentInput(String),

    /// A Monte Carlo cell produced no usable replication.
    #[error("no successful replications for lambda={lambda}, n={n}, estimator={estimator}")]
    EmptyCell {
        lambda: f64,
        n: usize,
        estimator: String,
    },
}

pub(crate) fn ensure_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive and finite, got {value}"
        )))
    }
}
