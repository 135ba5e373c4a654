//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("characteristic mismatch: {left} vs {right}")]
    CharacteristicMismatch { left: u64, right: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("indeterminate valuation: operand is zero to its stated precision")]
    IndeterminateValuation,
    #[error("cannot raise precision from {from} to {to}")]
    PrecisionIncrease { from: String, to: String },
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("value group mismatch between operands")]
    GroupMismatch,
    #[error("root-finding hypothesis violated: {0}")]
    HenselHypothesis(String),
    #[error("iteration stagnated; achieved precision {achieved}")]
    HenselStagnation { achieved: String },
    #[error("polynomial does not have the required shape: {0}")]
    ShapeMismatch(String),
    #[error("polygon does not certify a root of valuation {0}")]
    PolygonDoesNotCertify(String),
    #[error("coset collision: {0} already lies in the current value group")]
    CosetCollision(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("unknown example id: {0}")]
    UnknownExample(String),
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
}

impl Error {
    /// True for errors that indicate a malformed request rather than a
    /// mathematical failure; the CLI maps these to exit code 2.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::UnknownExample(_)
                | Error::ParamOutOfRange(_)
                | Error::NotPrime(_)
        )
    }
}
