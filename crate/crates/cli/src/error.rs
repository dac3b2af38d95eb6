use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] plankton_fde::Error),

    #[error("certificate failed: {0}")]
    Certificate(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// 1 invalid input, 2 numerical failure, 3 invariant or certificate failure.
    pub fn exit_code(&self) -> i32 {
        use plankton_fde::Error as E;
        match self {
            CliError::Config(_) | CliError::Io { .. } => 1,
            CliError::Certificate(_) => 3,
            CliError::Core(e) => match e {
                E::NumericalFailure { .. } => 2,
                E::InvariantViolation { .. } => 3,
                E::InvalidOrder(_)
                | E::Domain(_)
                | E::DegenerateOrder(_)
                | E::SingularParameter { .. }
                | E::InvalidParameter { .. }
                | E::Precondition(_)
                | E::Parse(_) => 1,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
