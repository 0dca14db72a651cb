//! Crate-wide error shared by the CLI and the HTTP service.

use serde::Serialize;
use thiserror::Error;

use crate::analysis::AnalysisError;
use crate::lattice::LatticeError;
use crate::optomech::OptomechError;
use crate::pca::PcaError;
use crate::tuning::TuningError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    /// Input does not parse or violates a model invariant.
    Schema,
    /// A solver failed on valid input.
    Solver,
    Io,
    Internal,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Schema => 1,
            ErrorKind::Solver => 2,
            ErrorKind::Io | ErrorKind::Internal => 3,
        }
    }

    pub fn http_status(self) -> u16 {
        match self {
            ErrorKind::Schema => 400,
            ErrorKind::Solver => 422,
            ErrorKind::Io | ErrorKind::Internal => 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error, Serialize)]
#[error("{message}")]
pub struct Error {
    pub kind: ErrorKind,
    pub message: String,
}

#[derive(Serialize)]
struct Body<'a> {
    error: &'a Error,
}

impl Error {
    pub fn new(kind: ErrorKind, message: impl Into<String>) -> Self {
        Self { kind, message: message.into() }
    }

    pub fn schema(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Schema, message)
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Io, message)
    }

    /// `{"error":{"kind":...,"message":...}}`, the body printed on stderr and
    /// returned by the service.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&Body { error: self }).expect("error serializes")
    }
}

impl From<LatticeError> for Error {
    fn from(e: LatticeError) -> Self {
        let kind = match e {
            LatticeError::NotPositiveDefinite { .. } | LatticeError::Solver(_) => ErrorKind::Solver,
            _ => ErrorKind::Schema,
        };
        Self::new(kind, e.to_string())
    }
}

impl From<AnalysisError> for Error {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Lattice(l) => l.into(),
            other => Self::schema(other.to_string()),
        }
    }
}

impl From<TuningError> for Error {
    fn from(e: TuningError) -> Self {
        match e {
            TuningError::Lattice(l) => l.into(),
            other => Self::schema(other.to_string()),
        }
    }
}

impl From<OptomechError> for Error {
    fn from(e: OptomechError) -> Self {
        let kind = match e {
            OptomechError::Solver(_) | OptomechError::NotConverged { .. } => ErrorKind::Solver,
            _ => ErrorKind::Schema,
        };
        Self::new(kind, e.to_string())
    }
}

impl From<PcaError> for Error {
    fn from(e: PcaError) -> Self {
        match e {
            PcaError::Lattice(l) => l.into(),
            other => Self::schema(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Self::schema(format!("invalid JSON: {e}"))
    }
}
