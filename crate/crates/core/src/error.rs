use alloc::string::String;

/// Errors raised by domain operations on well-formed inputs.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("unknown location id {0}")]
    UnknownLocation(u32),
    #[error("unknown input letter id {0}")]
    UnknownInput(u32),
    #[error("unknown output letter id {0}")]
    UnknownOutput(u32),
    #[error("unknown state id {0}")]
    UnknownState(u32),
    #[error("unknown action id {0}")]
    UnknownAction(u32),
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("prefix does not start at the initial location")]
    WrongStart,
    #[error("prefix of length {len} exceeds strategy depth {depth}")]
    DepthExceeded { len: usize, depth: usize },
    #[error("strategy undefined on {0}")]
    StrategyUndefined(String),
    #[error("prefixes have different lengths")]
    LengthMismatch,
    #[error("prefixes are not action-matching")]
    ActionMismatch,
    #[error("malformed prefix: {0}")]
    MalformedPrefix(String),
    #[error("prefix ends in the middle of a round")]
    MidTurn,
    #[error("strategy is not observation-based: {0}")]
    NotObservationBased(String),
    #[error("enumeration bound exceeded: about {estimate} terms, limit {limit}")]
    BoundsExceeded { estimate: u128, limit: u128 },
    #[error("{0}")]
    Domain(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
