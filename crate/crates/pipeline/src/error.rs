use std::path::PathBuf;

use thiserror::Error;

/// A CSV problem, located by 1-based line number where one applies.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum InputError {
    #[error("{path}: empty input")]
    Empty { path: String },
    #[error("{path}, line {line}: {message}")]
    Schema {
        path: String,
        line: u64,
        message: String,
    },
    #[error("{path}, line {line}: cannot parse {field} {value:?}")]
    Parse {
        path: String,
        line: u64,
        field: &'static str,
        value: String,
    },
    #[error("{path}: {message}")]
    Read { path: String, message: String },
}

impl InputError {
    pub fn line(&self) -> Option<u64> {
        match self {
            InputError::Schema { line, .. } | InputError::Parse { line, .. } => Some(*line),
            _ => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl PipelineError {
    /// 2 input or schema, 4 I/O. Model-fit failures surface through
    /// [`crate::RunResults::exit_code`].
    pub fn exit_code(&self) -> u8 {
        match self {
            PipelineError::Input(_) | PipelineError::Config(_) => 2,
            PipelineError::Io { .. } => 4,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        PipelineError::Io {
            path: path.into(),
            source,
        }
    }
}
