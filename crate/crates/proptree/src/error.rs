use thiserror::Error;

use crate::report::RunnerReport;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate quantifier name `{0}`")]
    DuplicateName(String),

    #[error("variable `{0}` has no generator annotation")]
    NoGenerator(String),

    #[error("variable `{0}` has no mutator annotation")]
    NoMutator(String),

    #[error("contract violation for `{name}`: rejected value {value}")]
    ContractViolation { name: String, value: String },

    #[error("environment has no binding named `{0}`")]
    MissingBinding(String),

    #[error("binding `{name}` holds a `{found}` value, expected `{expected}`")]
    TagMismatch {
        name: String,
        expected: String,
        found: String,
    },

    #[error("shrinking requires a falsifying input; got a {0} run")]
    ShrinkOnNonFailing(&'static str),

    #[error("a worker panicked during a parallel campaign")]
    WorkerPanic { partial: Box<RunnerReport> },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown workload `{0}`")]
    UnknownWorkload(String),

    #[error("unknown mutant `{0}`")]
    UnknownMutant(String),

    #[error("unknown property `{0}`")]
    UnknownProperty(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed record: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
