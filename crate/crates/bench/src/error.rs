use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("configuration: {0}")]
    Config(String),

    #[error("cannot access {path}: {message}")]
    Io { path: PathBuf, message: String },

    #[error("dataset {id}: {source}")]
    Dataset {
        id: String,
        #[source]
        source: oexnrule::Error,
    },

    #[error("report file: {0}")]
    ReportFormat(String),

    #[error("report holds no records")]
    EmptyReport,
}

impl BenchError {
    /// Short stable tag for machine-readable error output.
    pub fn kind(&self) -> &'static str {
        match self {
            BenchError::Config(_) => "config",
            BenchError::Io { .. } => "io",
            BenchError::Dataset { .. } => "dataset",
            BenchError::ReportFormat(_) => "report_format",
            BenchError::EmptyReport => "empty_report",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, e: std::io::Error) -> Self {
        BenchError::Io {
            path: path.into(),
            message: e.to_string(),
        }
    }
}
