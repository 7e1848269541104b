use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A verification or estimation precondition that the model does not meet.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Precondition {
    #[error("model is not live: state `{0}` has no outgoing transition")]
    NotLive(String),
    #[error("model contains an unobservable cycle through state `{0}`")]
    UnobservableCycle(String),
    #[error("model has no {0} annotation")]
    MissingAnnotation(&'static str),
    #[error("fault event `{0}` is observable")]
    ObservableFaultEvent(String),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Invalid(String),
    #[error("unknown event `{0}`")]
    UnknownEvent(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("event `{0}` is not observable")]
    NotObservable(String),
    #[error("observation not generable: longest generable prefix is `{prefix}` ({len} event(s))")]
    NotGenerable { prefix: String, len: usize },
    #[error("precondition violated: {0}")]
    Precondition(#[from] Precondition),
    #[error("bound {bound} exceeds the limit of {limit}")]
    BoundExceeded { bound: usize, limit: usize },
    #[error("string-length bound {0} truncates the enumeration")]
    Truncated(usize),
    #[error("enumeration exceeded {0} strings")]
    EnumerationLimit(usize),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn is_precondition(&self) -> bool {
        matches!(self, Error::Precondition(_))
    }
}
