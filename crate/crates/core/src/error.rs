use std::path::PathBuf;

use thiserror::Error;

/// Violations of a packet field schema.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("unknown field `{0}`")]
    UnknownField(String),
    #[error("value {value} out of range [{min}, {max}] for field `{field}`")]
    OutOfRange {
        field: String,
        value: u64,
        min: u32,
        max: u32,
    },
    #[error("invalid schema: {0}")]
    Invalid(String),
}

/// A lexical or syntactic error in program text, with a 1-based location.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Negation applied to something that is not a predicate, or a sugar
/// condition that is not a predicate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("kind error: {reason} in `{subterm}`")]
pub struct KindError {
    pub subterm: String,
    pub reason: String,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Kind(#[from] KindError),
    #[error("unbounded iteration `{0}` cannot be evaluated directly; evaluate an approximant (--n)")]
    ApproximationRequired(String),
    #[error("capacity exceeded: {what} is {got}, bound is {bound}")]
    Capacity {
        what: &'static str,
        got: usize,
        bound: usize,
    },
    #[error("probability {0} outside [0, 1]")]
    Probability(String),
    #[error("invalid distribution: {0}")]
    InvalidDist(String),
    #[error("{0}")]
    Measure(String),
    #[error("not an atomic program: `{0}`")]
    NotAtomic(String),
    #[error("topology: {0}")]
    Topology(String),
    #[error("routing: {0}")]
    Routing(String),
    #[error("traffic matrix: {0}")]
    Traffic(String),
    #[error("format: {0}")]
    Format(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code: 1 for I/O and input-format problems, 2 for
    /// language errors, 3 for capacity errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Syntax(_)
            | Error::Kind(_)
            | Error::Schema(_)
            | Error::ApproximationRequired(_)
            | Error::Probability(_)
            | Error::NotAtomic(_) => 2,
            Error::Capacity { .. } => 3,
            _ => 1,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
