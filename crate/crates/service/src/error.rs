use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("cannot read {}: {source}", path.display())]
    ConfigRead {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("bank {}: {source}", path.display())]
    Bank {
        path: PathBuf,
        #[source]
        source: imgany_core::Error,
    },
    #[error("banks are inconsistent: {0}")]
    BankMismatch(String),
    #[error("cannot listen on {addr}: {source}")]
    Bind {
        addr: String,
        #[source]
        source: std::io::Error,
    },
    #[error("server error: {0}")]
    Serve(#[source] std::io::Error),
}
