use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("valuation of zero is undefined")]
    UndefinedValuation,

    #[error("factorization failed for {0} within the configured effort")]
    FactorizationFailed(String),

    #[error("incomplete fixture: {0}")]
    IncompleteFixture(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("local solubility undecided for w^2 = {d1} u^4 + {d2} v^4 at {place} within precision bound")]
    PrecisionExhausted {
        d1: String,
        d2: String,
        place: String,
    },

    #[error("descent inconsistency: {0}")]
    Descent(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for errors caused by computational limits rather than bad input.
    pub fn is_computational(&self) -> bool {
        matches!(
            self,
            Error::FactorizationFailed(_) | Error::PrecisionExhausted { .. } | Error::Descent(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
