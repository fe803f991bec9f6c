use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is not alternating: {0}")]
    NotAlternating(String),
    #[error("sequence values must lie in {{0, 1}}")]
    NotBinary,
    #[error("sequence period must be nonempty")]
    EmptyPeriod,
    #[error("the character is trivial")]
    TrivialCharacter,
    #[error("window start {i0} lies above K_0 = {big_k0}")]
    WindowAboveK0 { i0: i64, big_k0: i64 },
    #[error("sigma_{0} vanishes; no witness character exists for this d")]
    VanishingSigma(i64),
    #[error("cocycle does not support this operation: {0}")]
    UnsupportedCocycle(&'static str),
    #[error("elements belong to different cocycles")]
    CocycleMismatch,
    #[error("element lies outside the table window: {0}")]
    OutsideWindow(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
