use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite value for {0}")]
    NonFinite(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("scenario parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("scenario is missing key `{0}`")]
    MissingKey(&'static str),

    #[error("invalid scenario: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<crate::config::Violation>),

    /// Quadrature stopped before reaching tolerance. `estimate` and `error`
    /// are the partial result at the point of failure.
    #[error(
        "quadrature for {component} did not converge (estimate {estimate:e}, error {error:e})"
    )]
    Quadrature {
        component: String,
        estimate: f64,
        error: f64,
    },

    #[error("no snapshots matched the conditioning event for {0}")]
    NoSamples(&'static str),

    #[error("unknown {kind} `{name}` (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("io error: {0}")]
    Io(String),
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
