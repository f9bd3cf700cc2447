use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("missing column `{0}` in log header")]
    MissingColumn(String),

    #[error("event log is empty")]
    EmptyLog,

    #[error("line {line}: {message}")]
    Row { line: u64, message: String },

    #[error("trace `{0}` has no events")]
    EmptyTrace(String),

    #[error("synthetic generation failed: {0}")]
    Generation(String),

    #[error("rate {0} is outside [0, 100]")]
    InvalidRate(f64),

    #[error("cannot connect node `{0}`: no usable transition in the log")]
    RepairImpossible(String),

    #[error("model has no activity nodes")]
    EmptyModel,

    #[error("{measure} is undefined for this model: {reason}")]
    DegenerateMeasure {
        measure: &'static str,
        reason: String,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{}: {source}", path.display())]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by the caller's input or environment rather than
    /// by the mining computation itself.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::File { .. }
                | Error::Io(_)
                | Error::Csv(_)
                | Error::InvalidConfig(_)
                | Error::InvalidRate(_)
                | Error::MissingColumn(_)
                | Error::Row { .. }
                | Error::EmptyLog
                | Error::EmptyTrace(_)
        )
    }
}
