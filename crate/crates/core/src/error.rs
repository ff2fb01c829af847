use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid arm model: {0}")]
    InvalidArm(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("bound undefined: {0}")]
    UndefinedBound(String),

    #[error("brute-force matching supports at most {max} arms, got {got}")]
    UnsupportedSize { max: usize, got: usize },

    #[error("eigen decomposition failed: {0}")]
    Eigen(String),

    #[error("check failed: {0}")]
    Check(String),

    #[error("auction did not terminate within {cap} rounds")]
    AuctionDiverged { cap: u64 },

    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("seed {seed} failed: {source}")]
    Seed {
        seed: u64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config { field: field.into(), message: message.into() }
    }

    /// True for errors caused by bad user input rather than a failed run.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Config { .. }
                | Error::InvalidArm(_)
                | Error::InvalidParameter { .. }
                | Error::Precondition(_)
                | Error::UnsupportedSize { .. }
        )
    }
}
