use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph has no start state")]
    NoStart,

    #[error("arc from state {from} points to missing state {to}")]
    InvalidStateReference { from: usize, to: usize },

    #[error("invalid weight {0}: costs must be non-negative or +inf")]
    InvalidWeight(f64),

    #[error("token spaces differ: left output is `{left}`, right input is `{right}`")]
    AlphabetMismatch { left: String, right: String },

    #[error("graph accepts no path")]
    EmptyLanguage,

    #[error("transcript must contain at least one word, and every word at least one phone")]
    EmptyTranscript,

    #[error("token {token} is not a usable phone in this vocabulary")]
    InvalidPhone { token: u32 },

    #[error("vocabulary mismatch: {0}")]
    VocabMismatch(String),

    #[error("{needed} frames needed to realise the transcript but only {available} available")]
    Infeasible { needed: usize, available: usize },

    #[error("malformed alignment path: {0}")]
    MalformedPath(String),

    #[error("invalid emission matrix: {0}")]
    InvalidEmissions(String),

    #[error("invalid reference alignment: {0}")]
    InvalidReference(String),

    #[error("no disfluency can be placed in an utterance of {words} word(s)")]
    NoEligibleDisfluency { words: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("{0}")]
    Format(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { path: path.into(), line, msg: msg.into() }
    }

    /// True for errors caused by an input that cannot be aligned at all, as
    /// opposed to malformed or unreadable inputs.
    pub fn is_infeasible(&self) -> bool {
        matches!(self, Error::Infeasible { .. } | Error::EmptyLanguage)
    }
}
