use std::path::PathBuf;

use gatree_core::arff::ArffError;
use gatree_core::evaluation::EvaluationError;
use gatree_core::evolution::EvolutionError;
use gatree_core::soil::SoilError;
use gatree_core::TreeError;

/// Process exit status for each error class.
pub mod exit {
    pub const OK: i32 = 0;
    pub const INPUT: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const SCHEMA: i32 = 3;
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Arff { path: PathBuf, source: ArffError },
    #[error("{}: malformed model: {message}", path.display())]
    Model { path: PathBuf, message: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("{0}")]
    Data(String),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Arff { .. } | Error::Model { .. } | Error::Data(_) => exit::INPUT,
            Error::Config(_) => exit::CONFIG,
            Error::SchemaMismatch(_) => exit::SCHEMA,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

impl From<TreeError> for Error {
    fn from(e: TreeError) -> Self {
        match e {
            TreeError::SchemaMismatch { .. } => Error::SchemaMismatch(e.to_string()),
            other => Error::Data(other.to_string()),
        }
    }
}

impl From<EvolutionError> for Error {
    fn from(e: EvolutionError) -> Self {
        match e {
            EvolutionError::InvalidConfig(m) => Error::Config(m),
            EvolutionError::Tree(t) => t.into(),
            other => Error::Data(other.to_string()),
        }
    }
}

impl From<EvaluationError> for Error {
    fn from(e: EvaluationError) -> Self {
        match e {
            EvaluationError::FoldCount { .. } => Error::Config(e.to_string()),
            EvaluationError::Evolution(e) => e.into(),
            EvaluationError::Tree(t) => t.into(),
        }
    }
}

impl From<SoilError> for Error {
    fn from(e: SoilError) -> Self {
        match e {
            SoilError::InvalidConfig(m) => Error::Config(m),
            other => Error::Data(other.to_string()),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
