use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("root radius insufficient: eps0 = {eps0} but the farthest point is {needed} from the root center")]
    RootRadiusInsufficient { eps0: f64, needed: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("missing parent link for ball {index} at level {level}")]
    MissingParent { level: usize, index: usize },

    #[error("correspondence is not surjective: target point {0} has no preimage")]
    NotSurjective(usize),

    #[error("at least two distinct scales are required for a dimension fit")]
    TooFewScales,

    #[error("precision exhausted after {bits} bits while deciding a ceiling")]
    PrecisionExhausted { bits: u32 },

    #[error("depth too deep; use sample_addresses ({requested} points exceed budget {budget})")]
    BudgetExceeded { requested: u128, budget: u64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
