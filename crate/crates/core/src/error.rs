use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group parameters: {0}")]
    InvalidGroup(String),

    #[error("invalid word {word:?}: {reason}")]
    InvalidWord { word: String, reason: String },

    #[error("empty set where a nonempty one is required: {0}")]
    EmptySet(&'static str),

    #[error("modulus {0} is not prime")]
    NotPrime(u64),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("field or group mismatch: {0}")]
    Mismatch(String),

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("augmentation impossible: c = {c} does not exceed H_{n} = {harmonic}")]
    AugmentImpossible { n: usize, c: String, harmonic: String },

    #[error("resource cap exceeded: {0}")]
    CapExceeded(String),

    #[error("synthesis failed: {0}")]
    LadderExhausted(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("decode error: {0}")]
    Decode(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
