use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(
        "window has {assignments} joint completions, above the enumeration cap of {cap}; \
         reduce missingness or attribute cardinality, or raise the cap"
    )]
    EnumerationCap { assignments: u128, cap: u64 },

    #[error("subject {subject}, transition {t}: {source}")]
    InWindow {
        subject: usize,
        t: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::Invalid(message.into())
    }

    /// True when the root cause is an exceeded enumeration cap.
    pub fn is_resource_limit(&self) -> bool {
        match self {
            Error::EnumerationCap { .. } => true,
            Error::InWindow { source, .. } => source.is_resource_limit(),
            _ => false,
        }
    }
}
