//! Process exit codes and the error type that carries them.

use std::fmt;

use capstream_core::metrics::MetricsError;

pub const OK: i32 = 0;
pub const INPUT: i32 = 2;
pub const PROTOCOL: i32 = 3;
pub const DEGENERATE: i32 = 4;

/// An error with the exit code it maps to.
pub struct Failure {
    pub code: i32,
    pub error: anyhow::Error,
}

impl fmt::Debug for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

pub type CliResult<T = ()> = Result<T, Failure>;

pub trait Classify<T> {
    fn input(self) -> CliResult<T>;
    fn protocol(self) -> CliResult<T>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn input(self) -> CliResult<T> {
        self.map_err(|e| Failure { code: INPUT, error: e.into() })
    }

    fn protocol(self) -> CliResult<T> {
        self.map_err(|e| Failure { code: PROTOCOL, error: e.into() })
    }
}

pub fn fail(code: i32, msg: impl fmt::Display) -> Failure {
    Failure { code, error: anyhow::anyhow!("{msg}") }
}

/// Degenerate inputs exit with 4; malformed ones with 2.
pub fn metrics_failure(e: MetricsError) -> Failure {
    let code = match e {
        MetricsError::Degenerate(_) | MetricsError::AllZeroDifferences => DEGENERATE,
        _ => INPUT,
    };
    Failure { code, error: e.into() }
}
