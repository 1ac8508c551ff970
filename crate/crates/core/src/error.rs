use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid performance: {0}")]
    InvalidPerformance(String),
    #[error("invalid importance: {0}")]
    InvalidImportance(String),
    #[error("tile coordinate ({a}, {b}) outside [0,1]^2")]
    InvalidCoord { a: f64, b: f64 },
    #[error("ranking score undefined: every outcome with positive importance has zero probability")]
    UndefinedScore,
    #[error("invalid range: lower bound {lower} is not below upper bound {upper}")]
    InvalidRange { lower: f64, upper: f64 },
    #[error("value {value} outside [{lower}, {upper}]")]
    OutOfRange { value: f64, lower: f64, upper: f64 },
    #[error("all weights are zero")]
    AllZeroWeights,
    #[error("invalid weight {0}")]
    InvalidWeight(f64),
    #[error("no entity has a defined score")]
    NoDefinedScores,
    #[error("entity sets differ")]
    EntityMismatch,
    #[error("at least 2 entities required, got {0}")]
    TooFewEntities(usize),
    #[error("empty input")]
    EmptyList,
    #[error("tile resolution must be at least 2, got {0}")]
    ResolutionTooSmall(usize),
    #[error("tile resolutions differ: {0} vs {1}")]
    ResolutionMismatch(usize, usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("dataset validation failed:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),
    #[error("unknown domain `{0}`")]
    UnknownDomain(String),
    #[error("unknown category `{0}`")]
    UnknownCategory(String),
    #[error("no reference domain left in category `{0}`")]
    EmptyCategory(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("strategy `{strategy}` unavailable: {reason}")]
    StrategyUnavailable { strategy: String, reason: String },
    #[error("dataset carries no global ranking")]
    MissingGlobalRanking,
    #[error("report contains no strategy")]
    EmptyReport,
    #[error("invalid strategy specification `{spec}`: {reason}")]
    StrategySpec { spec: String, reason: String },
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, err: impl std::fmt::Display) -> Self {
        Error::Io {
            path: path.into(),
            message: err.to_string(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
