//! CLI error taxonomy, mapped onto exit codes.

use thiserror::Error;

/// Failures from the scenario runner and CLI, split by exit code:
/// validation problems exit 1, runtime problems exit 2.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration: every detected problem, one per line.
    #[error("configuration invalid:\n{}", .0.join("\n"))]
    Validation(Vec<String>),
    /// A simulation or reconstruction failed at run time.
    #[error("runtime error: {0}")]
    Runtime(String),
    /// Reading or writing a file failed.
    #[error("i/o error on {path}: {source}")]
    Io {
        /// The offending path.
        path: String,
        /// The underlying error.
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// Process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Runtime(_) | CliError::Io { .. } => 2,
        }
    }
}

impl From<oamsim_core::Error> for CliError {
    fn from(e: oamsim_core::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}
