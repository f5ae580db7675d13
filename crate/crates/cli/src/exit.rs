use std::fmt;
use std::process::ExitCode;

/// Process exit codes. These values are a stable interface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    Usage = 2,
    Convergence = 3,
    PropertyViolation = 4,
    BandViolation = 5,
    GoldenMismatch = 6,
}

impl From<Exit> for ExitCode {
    fn from(e: Exit) -> ExitCode {
        ExitCode::from(e as u8)
    }
}

#[derive(Debug)]
pub struct CliError {
    pub exit: Exit,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            exit: Exit::Usage,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<turan_core::Error> for CliError {
    fn from(e: turan_core::Error) -> Self {
        let exit = match e {
            turan_core::Error::Convergence { .. } => Exit::Convergence,
            _ => Exit::Usage,
        };
        Self {
            exit,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::usage(format!("output: {e}"))
    }
}
