use imgany_core::ModalityTag;

#[derive(Debug, thiserror::Error)]
pub enum BackendError {
    #[error("transport error: {0}")]
    Transport(String),
    #[error("unexpected HTTP status {0}")]
    BadStatus(u16),
    #[error("response is not a PNG image")]
    NotPng,
    #[error("embedding dimension mismatch: expected {expected}, got {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("embedding contains non-finite values")]
    NonFinite,
    #[error("encoder answered for {found}, requested {expected}")]
    ModalityMismatch { expected: ModalityTag, found: ModalityTag },
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("malformed response: {0}")]
    MalformedResponse(String),
    #[error(transparent)]
    Core(#[from] imgany_core::Error),
}

impl BackendError {
    pub fn code(&self) -> &'static str {
        match self {
            BackendError::Transport(_) => "Transport",
            BackendError::BadStatus(_) => "BadStatus",
            BackendError::NotPng => "NotPng",
            BackendError::DimMismatch { .. } => "DimMismatch",
            BackendError::NonFinite => "NonFinite",
            BackendError::ModalityMismatch { .. } => "ModalityMismatch",
            BackendError::InvalidRequest(_) => "InvalidRequest",
            BackendError::MalformedResponse(_) => "MalformedResponse",
            BackendError::Core(e) => e.code(),
        }
    }

    /// Failures worth another attempt: the request may not have reached the
    /// server, or the server failed on its side.
    pub fn is_retryable(&self) -> bool {
        match self {
            BackendError::Transport(_) => true,
            BackendError::BadStatus(s) => *s >= 500,
            _ => false,
        }
    }
}

pub type Result<T, E = BackendError> = std::result::Result<T, E>;
