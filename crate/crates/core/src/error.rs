use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {what} = {value} ({reason})")]
    Domain {
        what: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// The result is not representable in double precision.
    #[error("range error: {0}")]
    Range(String),

    /// An argument is outside what this implementation supports.
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("root bracketing failed for ell = {ell} on [{lo}, {hi}]: {reason}")]
    BracketMiss {
        ell: u32,
        lo: f64,
        hi: f64,
        reason: String,
    },

    #[error(
        "quadrature did not converge on [{lo}, {hi}]: last estimate {last:e}, previous {previous:e}, error {error:e}"
    )]
    Quadrature {
        lo: f64,
        hi: f64,
        last: f64,
        previous: f64,
        error: f64,
    },

    #[error("least-squares fit failed: {0}")]
    Fit(String),

    #[error("series terms stopped decreasing at ell = {ell}: {term:e} after {previous:e}")]
    NonDecreasing { ell: u32, term: f64, previous: f64 },

    #[error("finite-difference step too small: {0}")]
    StepTooSmall(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

impl Error {
    /// True for errors caused by the caller's inputs rather than by the numerics.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Domain { .. } | Error::Argument(_))
    }

    /// Short stable identifier, used in machine-readable diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain { .. } => "domain",
            Error::Range(_) => "range",
            Error::Argument(_) => "argument",
            Error::BracketMiss { .. } => "bracket_miss",
            Error::Quadrature { .. } => "quadrature",
            Error::Fit(_) => "fit",
            Error::NonDecreasing { .. } => "non_decreasing",
            Error::StepTooSmall(_) => "step_too_small",
            Error::Internal(_) => "internal",
        }
    }
}

pub(crate) fn require_positive(what: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            what,
            value,
            reason: "must be positive and finite",
        })
    }
}
