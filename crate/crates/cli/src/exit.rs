use std::fmt::Display;

use imgany_backend::BackendError;
use imgany_core::{Error, PipelineError, Stage};
use imgany_service::ServiceError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Code {
    Invalid = 2,
    Io = 3,
    Pipeline = 4,
    Decoder = 5,
}

#[derive(Debug)]
pub struct Failure {
    pub code: Code,
    pub message: String,
}

impl Failure {
    pub fn new(code: Code, message: impl Display) -> Self {
        Self { code, message: message.to_string() }
    }

    pub fn invalid(message: impl Display) -> Self {
        Self::new(Code::Invalid, message)
    }

    pub fn io(message: impl Display) -> Self {
        Self::new(Code::Io, message)
    }

    /// Input-format problems are the caller's to fix (2); unreadable files
    /// and corrupt banks are environment problems (3).
    pub fn from_core(e: Error) -> Self {
        match e {
            Error::Io { .. }
            | Error::BadMagic(_)
            | Error::TruncatedFile
            | Error::VersionUnsupported(_)
            | Error::ChecksumMismatch { .. }
            | Error::MalformedBank(_) => Self::io(e),
            _ => Self::invalid(e),
        }
    }

    /// Rejected inputs (validation stage) exit 2; failures inside the
    /// pipeline proper exit 4. Both name the stage.
    pub fn from_pipeline(e: PipelineError) -> Self {
        let code = if e.stage == Stage::Validate { Code::Invalid } else { Code::Pipeline };
        Self::new(code, format!("{} failed at stage {}: {}", e.code(), e.stage.as_str(), e.source))
    }

    pub fn from_backend(e: BackendError) -> Self {
        match e {
            BackendError::InvalidRequest(_) => Self::invalid(e),
            _ => Self::new(Code::Decoder, format!("decoder: {e}")),
        }
    }

    pub fn from_service(e: ServiceError) -> Self {
        Self::io(e)
    }
}

pub type Outcome = Result<(), Failure>;

impl Failure {
    pub fn prefixed(mut self, path: &std::path::Path) -> Self {
        let shown = path.display().to_string();
        if !self.message.contains(&shown) {
            self.message = format!("{shown}: {}", self.message);
        }
        self
    }
}
