use std::path::Path;

use fuzzyds_core::cs::CsError;
use fuzzyds_core::ds2::Ds2Error;
use fuzzyds_core::ds4::Ds4Error;
use fuzzyds_core::expr::ExprError;
use fuzzyds_core::numerics::NumericsError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("verification failed: {0}")]
    VerifyFailed(String),
    #[error("expression error: {0}")]
    Expr(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } => 3,
            CliError::VerifyFailed(_) => 4,
            CliError::Expr(_) => 5,
        }
    }
}

impl From<ExprError> for CliError {
    fn from(e: ExprError) -> Self {
        CliError::Expr(e.to_string())
    }
}

impl From<CsError> for CliError {
    fn from(e: CsError) -> Self {
        match e {
            CsError::NonFiniteObservable { .. } | CsError::Observable { .. } => {
                CliError::Expr(e.to_string())
            }
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<Ds2Error> for CliError {
    fn from(e: Ds2Error) -> Self {
        match e {
            Ds2Error::Expr(e) => e.into(),
            Ds2Error::Cs(e) => e.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<Ds4Error> for CliError {
    fn from(e: Ds4Error) -> Self {
        match e {
            Ds4Error::Expr(e) => e.into(),
            Ds4Error::Cs(e) => e.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<NumericsError> for CliError {
    fn from(e: NumericsError) -> Self {
        CliError::Config(e.to_string())
    }
}
