use std::fmt;
use std::process::ExitCode;

/// Exit codes of `olp`. Clap itself exits with 2 on malformed arguments.
pub mod code {
    pub const USAGE: u8 = 2;
    pub const INPUT: u8 = 3;
    pub const SOLVE: u8 = 4;
    pub const LIMIT: u8 = 5;
    pub const CELLS: u8 = 6;
}

#[derive(Debug)]
pub enum Failure {
    /// Bad configuration or option values.
    Usage(anyhow::Error),
    /// The instance could not be read, parsed or generated.
    Input(anyhow::Error),
    /// A solver step failed.
    Solve(anyhow::Error),
    /// The run finished but hit an iteration, round or duplication cap.
    Limit(String),
    /// Some bench cells failed.
    Cells { failed: usize, total: usize },
}

impl Failure {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            Failure::Usage(_) => code::USAGE,
            Failure::Input(_) => code::INPUT,
            Failure::Solve(_) => code::SOLVE,
            Failure::Limit(_) => code::LIMIT,
            Failure::Cells { .. } => code::CELLS,
        })
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(e) => write!(f, "configuration error: {e:#}"),
            Failure::Input(e) => write!(f, "input error: {e:#}"),
            Failure::Solve(e) => write!(f, "solve error: {e:#}"),
            Failure::Limit(msg) => write!(f, "limit reached: {msg}"),
            Failure::Cells { failed, total } => write!(f, "{failed} of {total} bench cells failed"),
        }
    }
}

pub trait Classify<T> {
    fn usage(self) -> Result<T, Failure>;
    fn input(self) -> Result<T, Failure>;
    fn solve(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn usage(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Usage(e.into()))
    }

    fn input(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Input(e.into()))
    }

    fn solve(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Solve(e.into()))
    }
}
