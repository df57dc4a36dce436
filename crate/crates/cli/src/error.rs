use std::path::PathBuf;

use thiserror::Error;
use voicemark::mlpipe::MlError;

use crate::config::ConfigError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("no WAV files found in {0}")]
    NoInputs(PathBuf),
    #[error("cannot write {path}: {source}")]
    UnwritableOutput {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot load resource {path}: {message}")]
    Resource { path: PathBuf, message: String },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("stage '{stage}' failed: {source}")]
    Stage { stage: String, source: MlError },
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
}
