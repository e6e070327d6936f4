use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid data: {0}")]
    Validation(String),

    #[error("dimension mismatch: expected {expected} features, found {found}")]
    Dimension { expected: usize, found: usize },

    /// An operation was called outside its documented precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("program evaluation produced a non-finite value")]
    NonFinite,

    #[error("malformed program text: {0}")]
    ProgramSyntax(String),

    #[error("rebalancing failed: {0}")]
    Rebalance(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        match self {
            e @ Error::Stage { .. } => e,
            e => Error::Stage {
                stage,
                source: Box::new(e),
            },
        }
    }

    /// Process exit status for the command-line front end:
    /// 1 usage/config, 2 data, 3 pipeline.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::Parse { .. }
            | Error::Validation(_)
            | Error::Dimension { .. }
            | Error::Io { .. }
            | Error::Csv(_) => 2,
            Error::Stage { source, .. } => source.exit_code(),
            Error::Contract(_)
            | Error::NonFinite
            | Error::ProgramSyntax(_)
            | Error::Rebalance(_) => 3,
        }
    }
}
