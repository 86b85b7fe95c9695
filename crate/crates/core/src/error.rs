use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at offset {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),

    #[error("predicate `{name}` expects {expected} parameters, got {found}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },

    #[error("invalid predicate name `{0}`")]
    InvalidPredicateName(String),

    #[error("HOA parse error on line {line}: {message}")]
    Hoa { line: usize, message: String },

    #[error("unsupported acceptance condition: {0}")]
    UnsupportedAcceptance(String),

    #[error("incomplete transition function at state {state} for assignment {assignment}")]
    IncompleteTransition { state: usize, assignment: String },

    #[error("nondeterministic transition at state {state} for assignment {assignment}")]
    NondeterministicTransition { state: usize, assignment: String },

    #[error("partition violation: {0}")]
    PartitionViolation(String),

    #[error("formula outside the supported fragment: {0}")]
    UnsupportedFragment(String),

    #[error("unknown automaton state {0}")]
    UnknownState(usize),

    #[error("no epsilon transition available from state {0}")]
    NoEpsilonAvailable(usize),

    #[error("invalid action: {0}")]
    InvalidAction(String),

    #[error("assignment violates the at-most-one-true alphabet: {0}")]
    AlphabetViolation(String),

    #[error("rejection sampling budget exhausted (seed {seed}): {context}")]
    SamplingBudgetExhausted { seed: u64, context: String },

    #[error("not enough atoms: need {needed}, have {available}")]
    InsufficientAtoms { needed: usize, available: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("json error: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
