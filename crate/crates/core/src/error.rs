use thiserror::Error;

/// Errors shared across the crate.
///
/// Only genuine input/contract violations are reported through this type.
/// Internal invariant failures (a unit set that is not a subgroup, a checker
/// disagreement) are arithmetic bugs and panic instead.
#[derive(Debug, Error)]
pub enum Error {
    #[error("order {0} is not a prime power >= 2")]
    NotPrimePower(u64),

    #[error("group order {order} exceeds the configured cap {cap}")]
    CapExceeded { order: u128, cap: u64 },

    #[error("element has {got} coordinates, group has {expected}")]
    ElementShape { got: usize, expected: usize },

    #[error("elements belong to different groups")]
    GroupMismatch,

    #[error("invalid homomorphism: {0}")]
    InvalidHomomorphism(String),

    #[error("operation requires an automorphism")]
    NotAutomorphism,

    #[error("cyclotomic moduli {0} and {1} have no common embedding within the cap")]
    IncompatibleModuli(u64, u64),

    #[error("value is not a rational constant")]
    NotRational,

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("not the transform of a distribution: {0}")]
    InvalidCharFunction(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
