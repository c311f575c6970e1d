use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter violates an operation precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("n = {n} is not divisible by {divisor}")]
    Divisibility { n: usize, divisor: usize },

    #[error("configuration contains spoiled edges (s1 = {s1}, s2 = {s2})")]
    Spoiled { s1: usize, s2: usize },

    #[error("rejection cap of {cap} attempts exceeded without an unspoiled configuration")]
    RejectionCapExceeded { cap: u64 },

    #[error("pattern hypergraph has no perfect matching")]
    NoMatching,

    #[error("enumeration cap of {cap} exceeded")]
    EnumerationCap { cap: u64 },

    #[error("point ({x}, {y}) lies outside the closed domain 0 <= x <= y <= 1 - x")]
    OutsideDomain { x: f64, y: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for errors caused by the caller's configuration file rather than
    /// by a module precondition.
    pub fn is_config_error(&self) -> bool {
        matches!(self, Error::Config(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
