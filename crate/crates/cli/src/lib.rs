//! Batch verification runner for `opcalc`: suite configuration, checks with
//! machine-readable reports, and the MGF1 binary grid format.

pub mod config;
pub mod grid_io;
pub mod report;
pub mod suites;

pub use config::SuiteConfig;
pub use grid_io::{grid_io, read_grid, write_grid, GridIo};
pub use report::{CheckRecord, Environment, VerificationReport};
pub use suites::{run_suite, SUITES};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed grid file: {0}")]
    Format(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Compute(#[from] opcalc::Error),
}

impl CliError {
    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }

    /// Process exit code: computation errors count as failures, everything
    /// else is a usage problem.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Compute(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
