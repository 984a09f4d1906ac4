use thiserror::Error;

pub type Result<T> = std::result::Result<T, FunmvError>;

#[derive(Debug, Error)]
pub enum FunmvError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("overflow in {0}")]
    Overflow(String),

    #[error("malformed Matrix Market data at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl FunmvError {
    /// Input errors map to exit code 2, numerical failures to 3.
    pub fn is_numerical(&self) -> bool {
        matches!(self, FunmvError::Overflow(_))
    }
}
