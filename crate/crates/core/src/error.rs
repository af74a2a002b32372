use thiserror::Error;

use crate::edgeset::EdgeSet;
use crate::graph::DirEdge;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{message} at line {line}")]
    Parse { line: usize, message: String },

    #[error("{what} = {value} is out of range ({bound})")]
    OutOfRange {
        what: &'static str,
        value: String,
        bound: String,
    },

    #[error("estimated table size {estimate} entries exceeds the budget of {budget}")]
    MemoryBudget { estimate: u128, budget: u128 },

    #[error("no table entry for ({set:?}, {v}, {u})")]
    MissingEntry {
        set: EdgeSet,
        v: DirEdge,
        u: DirEdge,
    },

    #[error("inconsistent split witness: {0}")]
    Witness(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn out_of_range(
        what: &'static str,
        value: impl ToString,
        bound: impl ToString,
    ) -> Self {
        Error::OutOfRange {
            what,
            value: value.to_string(),
            bound: bound.to_string(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
