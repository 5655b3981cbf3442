use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("graph6 parse error at byte {offset}: {message}")]
    Graph6 { offset: usize, message: String },

    #[error("graph has no edges; its Laplacian has zero trace")]
    EmptyGraph,

    #[error("complete graphs admit no entangling labeling")]
    NoEntanglingLabeling,

    #[error("no violating labeling after {tried} labelings ({})", if *exhaustive { "exhaustive: none exists" } else { "budget exhausted" })]
    SearchExhausted { tried: u64, exhaustive: bool },

    #[error("construction requires {0}")]
    Precondition(String),

    #[error("certificate check failed: {0}")]
    CertificateCheck(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
