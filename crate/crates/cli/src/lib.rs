//! Library side of the `zq` command-line tool: report formatting, the
//! `verify-all` configuration and suites, and the single-shot commands.

pub mod commands;
pub mod config;
pub mod report;
pub mod suites;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const VERIFICATION_FAILED: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const CAPACITY: i32 = 3;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] zq_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(zq_core::Error::CapacityExceeded { .. }) => exit::CAPACITY,
            _ => exit::USAGE,
        }
    }
}
