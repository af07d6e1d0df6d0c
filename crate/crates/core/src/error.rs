use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A probability law violates one of its invariants.
    #[error("invalid law: {0}")]
    InvalidLaw(String),

    #[error("coordinate index {index} out of range for a system of size {n}")]
    Index { index: usize, n: usize },

    /// An enumeration or allocation would exceed a configured cap.
    #[error("{what} = {value} exceeds the cap of {cap}; {hint}")]
    Cap {
        what: &'static str,
        value: u64,
        cap: u64,
        hint: &'static str,
    },

    #[error("size mismatch: expected N = {expected}, found N = {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid mixing measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid coefficient table: {0}")]
    InvalidTable(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
