use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("range error: p = {p} needs samples outside the acquired range [{lo}, {hi}]{}",
        direction.map(|d| format!(" (direction {d})")).unwrap_or_default())]
    Range {
        p: f64,
        lo: f64,
        hi: f64,
        direction: Option<usize>,
    },

    #[error("chart error: {0}")]
    Chart(String),

    #[error("config error{}: {msg}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Config { line: Option<usize>, msg: String },

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(line: impl Into<Option<usize>>, msg: impl Into<String>) -> Self {
        Error::Config {
            line: line.into(),
            msg: msg.into(),
        }
    }

    /// Process exit code used by the command-line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } => 2,
            _ => 3,
        }
    }

    pub(crate) fn with_direction(self, index: usize) -> Self {
        match self {
            Error::Range { p, lo, hi, .. } => Error::Range {
                p,
                lo,
                hi,
                direction: Some(index),
            },
            other => other,
        }
    }
}
