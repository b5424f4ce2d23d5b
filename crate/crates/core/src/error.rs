use thiserror::Error;

use crate::frontend::ParseError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at {0}")]
    Parse(ParseError),
    #[error("unknown function '{0}'")]
    UnknownFunction(String),
    #[error("variable '{name}' does not appear in call {scope}")]
    UnknownVariable { scope: u64, name: String },
    #[error("unknown call node id {0}")]
    UnknownScope(u64),
    #[error("malformed event stream: {0}")]
    MalformedStream(String),
    #[error("malformed trace input: {0}")]
    MalformedInput(String),
    #[error("invalid limits: {0}")]
    InvalidLimits(String),
    #[error("invalid builtin doc table: {0}")]
    InvalidDocTable(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
