use thiserror::Error;

/// Failure classes of the command-line tool; each maps to a stable exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: String, message: String },

    #[error("{context}: {source}")]
    Validation {
        context: String,
        #[source]
        source: logent::Error,
    },

    #[error("{0}")]
    Compute(#[from] logent::Error),
}

impl CliError {
    pub const EXIT_OK: i32 = 0;
    pub const EXIT_INTERNAL: i32 = 1;
    pub const EXIT_USAGE: i32 = 2;
    pub const EXIT_IO: i32 = 3;
    pub const EXIT_PARSE: i32 = 4;
    pub const EXIT_VALIDATION: i32 = 5;
    pub const EXIT_CHECK_FAILED: i32 = 6;

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => Self::EXIT_USAGE,
            CliError::Io { .. } => Self::EXIT_IO,
            CliError::Parse { .. } => Self::EXIT_PARSE,
            CliError::Validation { .. } => Self::EXIT_VALIDATION,
            CliError::Compute(e) if e.is_validation() => Self::EXIT_VALIDATION,
            CliError::Compute(logent::Error::Config(_)) => Self::EXIT_USAGE,
            CliError::Compute(_) => Self::EXIT_INTERNAL,
        }
    }

    pub(crate) fn validation(context: impl Into<String>, source: logent::Error) -> Self {
        CliError::Validation {
            context: context.into(),
            source,
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
