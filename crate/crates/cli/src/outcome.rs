use std::io::Write;
use std::process::ExitCode;

use serde::Serialize;

use bjorth_core::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    Parse = 2,
    ShapeMismatch = 3,
    Failure = 4,
    Exceptional = 5,
}

/// What a command prints and how the process exits.
#[derive(Debug)]
pub struct Outcome {
    pub exit: Exit,
    pub stdout: Option<String>,
    pub stderr: Option<String>,
}

impl Outcome {
    pub fn json<T: Serialize>(exit: Exit, value: &T) -> Self {
        match bjorth_core::json::to_string(value) {
            Ok(text) => Outcome { exit, stdout: Some(text), stderr: None },
            Err(e) => Outcome::error(Exit::Failure, format!("serialization failed: {e}")),
        }
    }

    pub fn ok<T: Serialize>(value: &T) -> Self {
        Self::json(Exit::Ok, value)
    }

    pub fn error(exit: Exit, message: impl Into<String>) -> Self {
        Outcome { exit, stdout: None, stderr: Some(message.into()) }
    }

    pub fn emit(self) -> ExitCode {
        if let Some(text) = self.stdout {
            let mut out = std::io::stdout().lock();
            let _ = writeln!(out, "{text}");
        }
        if let Some(text) = self.stderr {
            eprintln!("bjorth: {text}");
        }
        ExitCode::from(self.exit as u8)
    }
}

impl From<Error> for Outcome {
    fn from(e: Error) -> Self {
        let exit = match e {
            Error::ShapeMismatch { .. } => Exit::ShapeMismatch,
            Error::InvalidShape(_)
            | Error::Malformed(_)
            | Error::Json(_)
            | Error::InvalidCanonicalForm(_)
            | Error::InvalidFactorization(_)
            | Error::BlockIndex { .. } => Exit::Parse,
            _ => Exit::Failure,
        };
        Outcome::error(exit, e.to_string())
    }
}
