use thiserror::Error;

use crate::config::ConfigError;
use crate::mtx::MtxError;

#[derive(Debug, Error)]
pub enum AppError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Mtx(#[from] MtxError),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Solver(#[from] sparsh_core::Error),
}

impl AppError {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        AppError::Io {
            path: path.into(),
            source,
        }
    }

    /// 1 for numerical failure of a solve, 2 for bad input or I/O.
    pub fn exit_code(&self) -> i32 {
        use sparsh_core::Error as E;
        match self {
            AppError::Solver(E::Diverged { .. } | E::SingularPivot { .. } | E::ZeroDiagonal { .. }) => 1,
            _ => 2,
        }
    }
}
