//! Pipeline driver, figure data and power-law fit for the `bandcert` tool.

pub mod config;
pub mod figures;
pub mod fit;
pub mod pipeline;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("missing data: {0}")]
    MissingData(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] bandcert::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, AnalysisError>;
