use thiserror::Error;

use crate::rational::Rational;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("negative time {0} (times must be >= 0)")]
    NegativeTime(Rational),

    #[error("invalid rational literal `{0}`")]
    InvalidRational(String),

    #[error("discount table has no factor for time {0}")]
    MissingFactor(Rational),

    #[error("invalid discount function: {0}")]
    InvalidDiscount(String),

    #[error("maximum acceptable payback period must be positive, got {0}")]
    NonPositiveMapp(Rational),

    #[error("metric {0} requires a discount function")]
    MissingDiscount(&'static str),

    #[error("unknown functional `{0}`")]
    UnknownFunctional(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("axiom check not applicable: {0}")]
    NotApplicable(String),
}
