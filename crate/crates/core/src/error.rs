use thiserror::Error;

/// Errors raised by constructors, samplers and protocol runners.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("index {index} out of range 1..={max}")]
    OutOfRange { index: usize, max: usize },
    #[error("input rejected: {0}")]
    Rejected(String),
    #[error("message budget exceeded: {used} bits > {budget} bits")]
    Budget { used: usize, budget: usize },
    #[error("enumeration budget exceeded: {0}")]
    Enumeration(String),
    #[error("pass budget exceeded: algorithm needs {needed} passes, budget is {budget}")]
    Passes { needed: usize, budget: usize },
    #[error("malformed input: {0}")]
    Parse(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
