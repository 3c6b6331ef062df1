// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {0} is out of range or has been deleted")]
    InvalidVertex(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("color class of node {0} is empty")]
    EmptyClass(usize),

    #[error("degenerate topology: {0}")]
    DegenerateTopology(String),

    #[error("{qubits} qubits exceed the statevector limit of {limit}")]
    Capacity { qubits: usize, limit: usize },

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Config error naming the offending field.
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
