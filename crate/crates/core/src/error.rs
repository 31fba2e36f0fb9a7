use thiserror::Error;

/// Errors raised by the analysis pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid substitution document: {0}")]
    InvalidSpec(String),

    #[error("unknown letter `{0}` in realisation")]
    UnknownLetter(String),

    #[error("alphabet is empty")]
    EmptyAlphabet,

    #[error("letter `{0}` has an empty rule set")]
    EmptyRule(String),

    #[error("letter `{0}` listed twice in alphabet")]
    DuplicateLetter(String),

    #[error("probabilities for `{letter}`: {reason}")]
    Probability { letter: String, reason: String },

    #[error("expansion budget exceeded: {what} (limit {limit})")]
    BudgetExceeded { what: String, limit: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("index {index} out of range for letter `{letter}` ({len} realisations)")]
    IndexOutOfRange {
        letter: String,
        index: usize,
        len: usize,
    },

    #[error("two realisations of `{0}` share the maximal length")]
    LengthTie(String),

    #[error("recurrence engine refused: {0}")]
    RecurrenceRefused(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("power iteration did not converge after {0} iterations")]
    NonConvergence(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn budget(what: impl Into<String>, limit: usize) -> Self {
        Error::BudgetExceeded {
            what: what.into(),
            limit,
        }
    }

    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    /// True for every variant caused by a malformed substitution document.
    pub fn is_spec_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidSpec(_)
                | Error::UnknownLetter(_)
                | Error::EmptyAlphabet
                | Error::EmptyRule(_)
                | Error::DuplicateLetter(_)
                | Error::Probability { .. }
        )
    }
}
