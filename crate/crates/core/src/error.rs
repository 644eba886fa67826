use std::path::PathBuf;

use thiserror::Error;

/// Raised while loading or validating configuration and data files.
/// The engine performs no validation after load.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed {what}: {source}")]
    Parse {
        what: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("invalid {field}: {detail}")]
    Invalid { field: String, detail: String },

    #[error(
        "emotion sector table digest mismatch (expected {expected}, found {actual}); \
         pass the sector override flag to run with a modified table"
    )]
    SectorDigest { expected: String, actual: String },
}

impl ConfigError {
    pub fn invalid(field: impl Into<String>, detail: impl Into<String>) -> Self {
        ConfigError::Invalid {
            field: field.into(),
            detail: detail.into(),
        }
    }

    pub fn parse(what: impl Into<String>, source: serde_json::Error) -> Self {
        ConfigError::Parse {
            what: what.into(),
            source,
        }
    }
}

/// Errors while reading a scenario file.
#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read scenario {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// serde_json reports the line and column of the offending token.
    #[error("malformed scenario: {0}")]
    Malformed(#[from] serde_json::Error),
}

/// Errors from the scenario runner, grouped by exit code.
#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error(transparent)]
    Scenario(#[from] ScenarioError),

    #[error("cannot write trace {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl RunError {
    pub const EXIT_MISSING_FILE: i32 = 3;
    pub const EXIT_BAD_SCENARIO: i32 = 4;
    pub const EXIT_BAD_CONFIG: i32 = 5;
    pub const EXIT_OUTPUT: i32 = 6;

    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(ConfigError::Io { .. })
            | RunError::Scenario(ScenarioError::Io { .. }) => Self::EXIT_MISSING_FILE,
            RunError::Config(_) => Self::EXIT_BAD_CONFIG,
            RunError::Scenario(ScenarioError::Malformed(_)) => Self::EXIT_BAD_SCENARIO,
            RunError::Output { .. } => Self::EXIT_OUTPUT,
        }
    }
}
