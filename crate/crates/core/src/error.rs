use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the domain the operation accepts.
    #[error("invalid parameter: {0}")]
    Parameter(String),
    /// An object is not in the state an operation requires (e.g. an incomplete trajectory).
    #[error("invalid state: {0}")]
    State(String),
    /// A conditional quantity was requested on a zero-probability event.
    #[error("domain error: {0}")]
    Domain(String),
    /// The objective does not change sign on the requested bracket.
    #[error("bracket error: {0}")]
    Bracket(String),
    /// The edges revealed by a coupled exploration disagree with the graph it was paired with.
    #[error("coupling violation at vertex {vertex}: {detail}")]
    CouplingViolation { vertex: usize, detail: String },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
