use thiserror::Error;

/// Errors produced by the channel model, the searches and the scenario parser.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid gain {gain} for {levels} signal levels")]
    InvalidGain { levels: usize, gain: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("size guard exceeded: {what} is {value}, limit is {limit}")]
    SizeGuard {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("invalid topology: {0}")]
    Topology(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("topology is not reducible: {0}")]
    NotReducible(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("{}", format_parse(.line, .field, .message))]
    Parse {
        line: Option<usize>,
        field: Option<String>,
        message: String,
    },
}

fn format_parse(line: &Option<usize>, field: &Option<String>, message: &str) -> String {
    match (line, field) {
        (Some(l), Some(f)) => format!("parse error at line {l}, field `{f}`: {message}"),
        (Some(l), None) => format!("parse error at line {l}: {message}"),
        (None, Some(f)) => format!("parse error in field `{f}`: {message}"),
        (None, None) => format!("parse error: {message}"),
    }
}

pub type Result<T> = std::result::Result<T, Error>;
