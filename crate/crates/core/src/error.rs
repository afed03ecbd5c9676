use thiserror::Error;

use crate::heckeio::DatasetError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Operands or parameters that do not belong together (different fields,
    /// malformed field parameters, wrong coordinate counts).
    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("element is not a unit: {0}")]
    NonUnit(String),

    /// A value outside the range an operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("capacity exceeded for {what}: requires {required}, cap is {cap}")]
    Capacity { what: String, required: u128, cap: u128 },

    /// An input broke a documented precondition (e.g. a set that should be a
    /// closed submodule is not).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("t = {t} is not realizable (nearest realizable below: {below:?}, above: {above:?})")]
    Unrealizable {
        t: u128,
        below: Option<u128>,
        above: Option<u128>,
    },

    /// A computation contradicted a statement that the classification relies on.
    #[error("theorem violation: {0}")]
    TheoremViolation(String),

    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

impl Error {
    pub(crate) fn capacity(what: impl Into<String>, required: u128, cap: u128) -> Self {
        Error::Capacity {
            what: what.into(),
            required,
            cap,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Capacity { .. } => 3,
            _ => 2,
        }
    }
}
