use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("tensor is not group-like: level-0 coefficient is {0}, expected 1")]
    NotGroupLike(f64),

    #[error("series too short: need at least {needed} observations, got {found}")]
    TooShort { needed: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid projection: tuple size {k} with {dim} channels")]
    InvalidProjection { k: usize, dim: usize },

    #[error("empty window: window length {length} exceeds series length {n}")]
    EmptyWindow { length: usize, n: usize },

    #[error("feature budget exceeded: {predicted} features predicted, limit is {limit}")]
    FeatureBudget { predicted: usize, limit: usize },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),
}

impl Error {
    pub(crate) fn mismatch(expected: impl core::fmt::Display, found: impl core::fmt::Display) -> Self {
        use alloc::string::ToString;
        Error::DimensionMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}
