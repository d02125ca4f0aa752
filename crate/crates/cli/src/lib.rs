//! Library side of the `fogsim` command-line pipeline.
//!
//! Each subcommand is an ordinary function over a typed argument struct, so
//! integration tests drive the exact code paths the binary runs.

pub mod commands;
pub mod config;
pub mod presets;

/// Command outcome mapped to process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or arguments (exit 1).
    Validation(String),
    /// Failure while running (exit 2).
    Runtime(String),
    /// A requested acceptance flag did not hold (exit 3).
    FlagFailure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Runtime(_) => 2,
            CliError::FlagFailure(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid configuration: {m}"),
            CliError::Runtime(m) => write!(f, "{m}"),
            CliError::FlagFailure(m) => write!(f, "acceptance flag failed: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

pub(crate) fn runtime<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Runtime(e.to_string())
}
