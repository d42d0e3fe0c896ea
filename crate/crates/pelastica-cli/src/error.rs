use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("assumption violated: {0}")]
    Assumption(String),
    #[error("no convergence: {0}")]
    NonConvergence(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// Process exit status: 2 config, 3 assumption, 4 non-convergence, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Assumption(_) => 3,
            CliError::NonConvergence(_) => 4,
            CliError::Io { .. } | CliError::Json(_) => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

impl From<pelastica::Error> for CliError {
    fn from(e: pelastica::Error) -> Self {
        use pelastica::Error as E;
        match e {
            E::Domain(m) => CliError::Config(m),
            E::Unsupported(_) => CliError::Config(e.to_string()),
            E::Assumption(m) => CliError::Assumption(m),
            E::Threshold { .. } | E::SlopeBlowup(_) | E::MixedSign(_) => CliError::Assumption(e.to_string()),
            E::NonConvergence(m) => CliError::NonConvergence(m),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
