//! Library side of the `pwpn` command-line tool: argument handling, report
//! assembly and the parallel drivers behind each subcommand.

pub mod app;
pub mod catalog_run;
pub mod manifest;
pub mod par;
pub mod report;
pub mod search;
pub mod spec;
pub mod suites;

pub use app::run;

/// Exit code when every check passed.
pub const EXIT_OK: i32 = 0;
/// Exit code when a requested assertion or verification failed.
pub const EXIT_FAILED: i32 = 2;
/// Exit code for malformed invocations or inputs.
pub const EXIT_USAGE: i32 = 64;
/// Exit code when a size limit was exceeded.
pub const EXIT_LIMIT: i32 = 65;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("limit: {0}")]
    Limit(String),
    #[error("{0}")]
    Core(#[from] pwpn_core::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Limit(_) | CliError::Core(pwpn_core::Error::SizeLimit { .. }) => EXIT_LIMIT,
            _ => EXIT_USAGE,
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> CliError {
        CliError::Usage(format!("json: {e}"))
    }
}
