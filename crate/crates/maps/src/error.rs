use std::path::PathBuf;

use grazing_core::dmaps::DmapError;
use grazing_core::fit::FitError;
use grazing_core::grazing::GrazingError;
use grazing_core::sysdsl::{ParamError, ParseError};

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const USAGE: i32 = 2;
    pub const GATE: i32 = 3;
    pub const NUMERICAL: i32 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0}")]
    UnknownSystem(#[from] grazing_core::systems::UnknownSystem),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("invalid argument: {0}")]
    Usage(String),
    #[error(transparent)]
    Grazing(#[from] GrazingError),
    #[error(transparent)]
    Map(#[from] DmapError),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("classification gate failed: {0}")]
    Gate(String),
    #[error("{failed} of {total} rows failed")]
    TooManyFailures { failed: usize, total: usize },
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Gate(_) => exit::GATE,
            Error::Map(DmapError::NotOrder4 { .. }) | Error::Map(DmapError::NonpositiveRadicand { .. }) => exit::GATE,
            Error::TooManyFailures { .. } => exit::NUMERICAL,
            _ => exit::USAGE,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
