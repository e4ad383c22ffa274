use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("vector must be nonempty")]
    Empty,

    #[error("coordinate {index} = {value} lies outside [0,1]")]
    OutOfCube { index: usize, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "anchors {first} and {second} violate the Lipschitz bound on output coordinate {coord}"
    )]
    LipschitzViolation {
        first: usize,
        second: usize,
        coord: usize,
    },

    #[error("size overflow: {0}")]
    SizeOverflow(String),

    #[error("incompatible instance: {0}")]
    Incompatible(String),

    #[error("format error: {0}")]
    Format(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
