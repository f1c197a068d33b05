use thiserror::Error;

/// Errors produced by table construction, order/group operations and the
/// extension pipeline. `Parse` marks malformed input; everything else is a
/// domain error.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("label collision: {0}")]
    LabelCollision(String),
    #[error("unknown label: {0}")]
    UnknownLabel(String),
    #[error("duplicate entries: {0}")]
    Duplicate(String),
    #[error("empty input: {0}")]
    Empty(String),
    #[error("map is not total: missing image for {0}")]
    NotTotal(String),
    #[error("invalid table: {0}")]
    InvalidTable(String),
    #[error("exponent structure is not a group; cannot multiply")]
    ExponentsNotGroup,
    #[error("nonpositive input: {0}")]
    Nonpositive(String),
    #[error("chain is not characteristic for value {0}")]
    NotCharacteristic(String),
    #[error("tau must exceed 1, got {0}")]
    TauOutOfRange(String),
    #[error("brute-force bound {bound} exceeded: space has {size} points")]
    BoundExceeded { bound: usize, size: usize },
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
