use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("budget cap exceeded: {what} = {value} (cap {cap})")]
    BudgetCap {
        what: &'static str,
        value: u64,
        cap: u64,
    },

    #[error("conditioning on a null event: mu({0}) = 0")]
    NullCondition(String),

    #[error("invalid measure spec: {0}")]
    InvalidSpec(String),

    #[error("alphabet mismatch: expected size {expected}, got {found}")]
    AlphabetMismatch { expected: usize, found: usize },

    #[error("unregistered measure index {0}")]
    Unregistered(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("snapshot digest mismatch in {path}")]
    DigestMismatch { path: PathBuf },

    #[error("snapshot ISA version {found} does not match {expected}")]
    IsaVersion { found: u32, expected: u32 },

    #[error("malformed snapshot record at line {line}: {reason}")]
    MalformedSnapshot { line: usize, reason: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl LabError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LabError::Io {
            path: path.into(),
            source,
        }
    }
}
