//! Errors of the command-line front end and the exit codes they map to.

use std::path::PathBuf;

use frameguard::agents::AgentError;
use frameguard::csvio::CsvError;
use frameguard::probe::ProbeError;
use frameguard::score::ScoreError;
use frameguard::server::ServerError;
use thiserror::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_HANDSHAKE: u8 = 2;
pub const EXIT_BIND: u8 = 3;
pub const EXIT_CALIBRATION: u8 = 4;
pub const EXIT_ABORT: u8 = 5;
pub const EXIT_PARSE: u8 = 6;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("agent handshake failed: {0}")]
    Handshake(String),
    #[error(transparent)]
    Bind(ServerError),
    #[error(transparent)]
    Calibration(ProbeError),
    #[error("variant `{label}`: {source}")]
    Aborted { label: String, source: ServerError },
    #[error("{}: line {line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Server(ServerError),
    #[error(transparent)]
    Agent(AgentError),
    #[error(transparent)]
    Score(#[from] ScoreError),
    #[error(transparent)]
    Probe(ProbeError),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Handshake(_) => EXIT_HANDSHAKE,
            CliError::Agent(AgentError::Rejected) => EXIT_HANDSHAKE,
            CliError::Bind(_) => EXIT_BIND,
            CliError::Calibration(_) => EXIT_CALIBRATION,
            CliError::Aborted { .. } => EXIT_ABORT,
            CliError::Parse { .. } => EXIT_PARSE,
            _ => EXIT_FAILURE,
        }
    }

    /// Wraps a CSV failure on `path`, keeping its line number when it has one.
    pub fn csv(path: impl Into<PathBuf>, e: CsvError) -> Self {
        let path = path.into();
        match e {
            CsvError::Parse { line, message } => CliError::Parse {
                path,
                line,
                message,
            },
            CsvError::Header { expected, found } => CliError::Parse {
                path,
                line: 1,
                message: format!("expected header `{expected}`, found `{found}`"),
            },
            CsvError::Io { source, .. } => CliError::Io { path, source },
            CsvError::Write(message) => CliError::Io {
                path,
                source: std::io::Error::other(message),
            },
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<ServerError> for CliError {
    fn from(e: ServerError) -> Self {
        match e {
            ServerError::Bind { .. } => CliError::Bind(e),
            ServerError::Handshake(_) | ServerError::VersionMismatch { .. } => {
                CliError::Handshake(e.to_string())
            }
            other => CliError::Server(other),
        }
    }
}

impl From<AgentError> for CliError {
    fn from(e: AgentError) -> Self {
        CliError::Agent(e)
    }
}
