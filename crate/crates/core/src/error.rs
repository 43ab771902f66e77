use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("partition does not cover node '{0}'")]
    PartitionCoverage(String),

    #[error("graph is empty")]
    EmptyGraph,

    #[error("graph has zero total edge weight")]
    ZeroWeight,

    #[error("partitions are defined over different node sets")]
    NodeSetMismatch,

    #[error("all target sizes are zero for source area {0}")]
    ZeroTargetSize(String),

    #[error("need at least {needed} topic areas, found {found}")]
    TooFewAreas { needed: usize, found: usize },

    #[error("stage '{stage}' failed: {cause}")]
    Stage { stage: String, cause: Box<Error> },

    #[error("artifact '{artifact}' is missing; run the '{stage}' stage first")]
    MissingArtifact { artifact: String, stage: String },

    #[error("unknown {kind} '{given}'; valid options: {valid}")]
    UnknownOption {
        kind: &'static str,
        given: String,
        valid: String,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn in_stage(self, stage: &str) -> Self {
        Error::Stage {
            stage: stage.to_string(),
            cause: Box::new(self),
        }
    }
}
