use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime in [2, 2^31 - 1]")]
    InvalidPrime(u64),

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("unknown variable `{name}` at position {position}")]
    UnknownVariable { name: String, position: usize },

    #[error("operands live in different polynomial rings")]
    RingMismatch,

    #[error("exponent overflow: predicted degree {0} does not fit in 32 bits")]
    ExponentOverflow(u64),

    #[error("polynomial is not homogeneous: terms `{first}` and `{second}` have different degrees")]
    Inhomogeneous { first: String, second: String },

    #[error("invalid grading: {0}")]
    InvalidGrading(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("criteria disagree: {0}")]
    Inconsistent(String),

    #[error("Groebner step budget of {budget} exhausted ({context})")]
    BudgetExceeded { budget: u64, context: String },
}

impl Error {
    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}
