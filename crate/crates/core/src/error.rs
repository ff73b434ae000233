use thiserror::Error;

/// Errors surfaced by planning, decoding and the supporting algebra.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),

    #[error("modulus {0} does not fit in 61 bits")]
    ModulusTooLarge(u64),

    #[error("elements from different fields: GF({0}) and GF({1})")]
    FieldMismatch(u64, u64),

    #[error("division by zero")]
    DivisionByZero,

    #[error("field GF({modulus}) too small: need at least {required} elements")]
    FieldTooSmall { required: u64, modulus: u64 },

    #[error("usage error: {0}")]
    Usage(String),

    #[error("samples inconsistent with degree bound {degree_bound}")]
    Inconsistent { degree_bound: usize },

    #[error("insufficient responses: need {needed}, got {got}")]
    InsufficientResponses { needed: usize, got: usize },

    #[error("decoding failure: {0}")]
    DecodingFailure(String),

    #[error("search budget exceeded: {0}")]
    BudgetExceeded(String),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn decoding(msg: impl Into<String>) -> Self {
        Error::DecodingFailure(msg.into())
    }

    /// Stable kebab-case name of the variant, used in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotPrime(_) => "not-prime",
            Error::ModulusTooLarge(_) => "modulus-too-large",
            Error::FieldMismatch(..) => "field-mismatch",
            Error::DivisionByZero => "division-by-zero",
            Error::FieldTooSmall { .. } => "field-too-small",
            Error::Usage(_) => "usage",
            Error::Inconsistent { .. } => "inconsistent",
            Error::InsufficientResponses { .. } => "insufficient-responses",
            Error::DecodingFailure(_) => "decoding-failure",
            Error::BudgetExceeded(_) => "budget-exceeded",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
