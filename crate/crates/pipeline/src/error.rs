use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("unknown dataset '{0}' (try list-datasets)")]
    UnknownDataset(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("bundled data: {0}")]
    Data(String),
    #[error(transparent)]
    Core(#[from] qcorr_core::Error),
    #[error("i/o on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type PipelineResult<T> = Result<T, PipelineError>;

impl PipelineError {
    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        PipelineError::Io { path: path.display().to_string(), source }
    }
}
