use thiserror::Error;
use varparam::error::{IntegrateError, ParseError, ReduceError, ValidationError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {0}: {1}")]
    Io(String, #[source] std::io::Error),
    #[error("malformed problem file: {0}")]
    Format(String),
    #[error("missing field `{0}`")]
    Missing(&'static str),
    #[error("field `{field}`: {msg}")]
    Field { field: &'static str, msg: String },
    #[error("field `{field}` (\"{text}\"): {source}")]
    Expr {
        field: &'static str,
        text: String,
        #[source]
        source: ParseError,
    },
    #[error("unknown example `{name}` (known: {known})")]
    UnknownExample { name: String, known: String },
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error("reduction failed: {0}")]
    Reduce(#[from] ReduceError),
    #[error("no closed form and the numeric route failed: {0}")]
    Solve(IntegrateError),
    #[error("cannot write {0}: {1}")]
    Output(String, #[source] std::io::Error),
}

impl CliError {
    /// 2 validation, 3 reduction, 4 solve; output failures count as 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Reduce(ReduceError::Invalid(_)) => 2,
            CliError::Reduce(_) => 3,
            CliError::Solve(_) => 4,
            CliError::Output(..) => 1,
            _ => 2,
        }
    }
}
