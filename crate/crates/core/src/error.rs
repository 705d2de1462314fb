use std::io;

use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet size must be between 1 and {max}, got {got}")]
    InvalidAlphabet { got: usize, max: usize },
    #[error("alphabet mismatch: {left} vs {right}")]
    AlphabetMismatch { left: u8, right: u8 },
    #[error("letter {letter} out of range for alphabet of size {k}")]
    LetterOutOfRange { letter: u8, k: u8 },
    #[error("enumeration of {requested} items exceeds cap {cap}")]
    CapExceeded { requested: u128, cap: u64 },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("unsupported format version: {0}")]
    VersionMismatch(String),
    #[error("address map is not total: missing {0}")]
    NotTotal(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid Markov system: {0}")]
    InvalidSystem(String),
    #[error("invalid commuting pair: {0}")]
    InvalidPair(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("offset beyond horizon {horizon}")]
    BeyondHorizon { horizon: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
