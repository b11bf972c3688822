//! Front ends for the `detgen` and `stogen` binaries.
//!
//! Both commands take their settings from built-in defaults, then `+F`
//! configuration files in order, then the remaining flags. Exit codes:
//! 0 on success, 1 when a stage fails, 2 on a usage error.

pub mod config;
mod detgen_cmd;
mod stogen_cmd;

use std::io::Write;

pub use config::{resolve_config, CliConfig, CliError, CommandSpec, FlagKind, FlagSpec, Source};
pub use detgen_cmd::{run_detgen, DETGEN};
pub use stogen_cmd::{run_stogen, STOGEN};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Failure of a whole command run.
pub(crate) enum RunError {
    Cli(CliError),
    Stage(String),
}

impl From<CliError> for RunError {
    fn from(e: CliError) -> Self {
        RunError::Cli(e)
    }
}

impl From<mcndgen_core::Error> for RunError {
    fn from(e: mcndgen_core::Error) -> Self {
        RunError::Stage(e.to_string())
    }
}

pub(crate) fn stage(msg: impl Into<String>) -> RunError {
    RunError::Stage(msg.into())
}

pub(crate) fn read_text(path: &str) -> Result<String, RunError> {
    std::fs::read_to_string(path).map_err(|e| stage(format!("cannot read {path}: {e}")))
}

pub(crate) fn write_text(path: &str, text: &str) -> Result<(), RunError> {
    std::fs::write(path, text).map_err(|e| stage(format!("cannot write {path}: {e}")))
}

/// Map a run result to an exit code, printing usage or the error.
pub(crate) fn finish(spec: &CommandSpec, result: Result<(), RunError>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match result {
        Ok(()) => EXIT_OK,
        Err(RunError::Cli(CliError::Help)) => {
            let _ = out.write_all(spec.usage().as_bytes());
            EXIT_OK
        }
        Err(RunError::Cli(CliError::Usage(msg))) => {
            let _ = writeln!(err, "{}: {msg}", spec.name);
            let _ = err.write_all(spec.usage().as_bytes());
            EXIT_USAGE
        }
        Err(RunError::Stage(msg)) => {
            let _ = writeln!(err, "{}: error: {msg}", spec.name);
            EXIT_FAILURE
        }
    }
}

pub(crate) fn echo(config: &CliConfig, err: &mut dyn Write) {
    let _ = writeln!(err, "effective configuration:");
    let _ = err.write_all(config.echo().as_bytes());
}
