use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("letter `{0}` is not in the alphabet")]
    UnknownLetter(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("unsupported by this backend: {0}")]
    Unsupported(String),
    #[error("sets belong to different presentation backends")]
    MixedBackends,
    #[error("word contains the symbolic parameter; a concrete word is required")]
    Symbolic,
    #[error("integer overflow in exact arithmetic")]
    Overflow,
    #[error("non-uniform structure: {0}")]
    NonUniform(String),
    #[error("closure fixpoint not reached: {0}")]
    Closure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
