use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid rational {0:?}")]
    ParseRational(String),
    #[error("endpoint {0} is not a dyadic rational in [0,1]")]
    NotDyadic(String),
    #[error("empty interval [{lo}, {hi})")]
    EmptyInterval { lo: String, hi: String },
    #[error("malformed set {0:?}")]
    ParseSet(String),
    #[error("invalid step function: {0}")]
    StepFunction(String),
    #[error("invalid level address: {0}")]
    Address(String),
    #[error("level position overflows i64")]
    PositionOverflow,
    #[error("parameter {name} out of range: {reason}")]
    OutOfRange { name: &'static str, reason: String },
    #[error("set is not contained in the fiber of level {0}")]
    NotInLevel(i64),
    #[error("{0} requires the built-in bdp system")]
    RequiresBdp(&'static str),
    #[error("unsupported exponent: {0}")]
    Exponent(String),
    #[error("system descriptor: {0}")]
    Descriptor(String),
}

pub type Result<T> = std::result::Result<T, Error>;
