use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid track geometry: {0}")]
    Geometry(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("episode is over; call reset before stepping again")]
    EpisodeOver,

    #[error("step called before reset")]
    NotReset,

    #[error("batch length mismatch: {envs} environments, {actions} actions")]
    LengthMismatch { envs: usize, actions: usize },

    #[error("dataset format error: {0}")]
    Format(String),

    #[error("dataset truncated: {0}")]
    Truncation(String),

    #[error("dataset dimension mismatch: {0}")]
    Dimension(String),

    #[error("input {input} holds {available} transitions but its quota is {quota}")]
    InsufficientData {
        input: usize,
        available: u64,
        quota: u64,
    },

    #[error("invalid mixing ratios: {0}")]
    Ratio(String),

    #[error("unknown policy `{0}` (expected one of: expert, medium, basic, random)")]
    UnknownPolicy(String),

    #[error("replay mismatch at step {step}: recorded {recorded}, replayed {replayed}")]
    ReplayMismatch {
        step: usize,
        recorded: f64,
        replayed: f64,
    },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
