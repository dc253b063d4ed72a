use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("bad override `{spec}`: {message}")]
    Override { spec: String, message: String },

    #[error("unknown preset `{0}` (see `presets-list`)")]
    UnknownPreset(String),

    #[error("{0}")]
    Usage(String),

    #[error("scenario `{scenario}`: {source}")]
    Solver {
        scenario: String,
        #[source]
        source: kerrsplit::Error,
    },

    #[error(transparent)]
    Core(#[from] kerrsplit::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// Stable machine-readable category printed on failure.
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Config { .. } => "config-schema",
            CliError::Override { .. } => "override",
            CliError::UnknownPreset(_) => "unknown-preset",
            CliError::Usage(_) => "usage",
            CliError::Solver { source, .. } | CliError::Core(source) => source.category(),
            CliError::Io { .. } => "io",
        }
    }

    /// Process exit code: 2 for bad input, 3 for solver failures, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. }
            | CliError::Override { .. }
            | CliError::UnknownPreset(_)
            | CliError::Usage(_) => 2,
            CliError::Solver { .. } | CliError::Core(_) => 3,
            CliError::Io { .. } => 4,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }

    pub(crate) fn in_scenario(scenario: &str) -> impl FnOnce(kerrsplit::Error) -> CliError + '_ {
        move |source| CliError::Solver {
            scenario: scenario.to_string(),
            source,
        }
    }
}
