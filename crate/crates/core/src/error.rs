use thiserror::Error;

/// Errors produced by the game models, solvers and experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("normal form too large: {entries} matrix entries exceeds cap of {cap}")]
    TooLarge { entries: u128, cap: u128 },

    #[error("profile is missing information set {infoset} of player {player}")]
    MissingInfoset { player: usize, infoset: usize },

    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
