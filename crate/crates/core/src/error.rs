use std::path::PathBuf;

use crate::model::CriterionId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad classes used by front ends to pick an exit code or HTTP status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed or invalid document.
    Validation,
    /// Referenced design, sheet or file does not exist.
    NotFound,
    /// Stale revision on write.
    Conflict,
    /// Criterion inputs that no level can be derived from.
    CriterionInput,
    /// Aggregation or merge preconditions.
    Aggregation,
    /// Image or filesystem failure.
    Io,
}

impl ErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::Validation => "validation",
            ErrorKind::NotFound => "not_found",
            ErrorKind::Conflict => "conflict",
            ErrorKind::CriterionInput => "criterion_input",
            ErrorKind::Aggregation => "aggregation",
            ErrorKind::Io => "io",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("schema violation at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("unknown criterion `{0}`")]
    UnknownCriterion(String),
    #[error("missing criterion `{0}`")]
    MissingCriterion(CriterionId),
    #[error("criterion `{0}` assessed more than once")]
    DuplicateCriterion(CriterionId),
    #[error("score {value} for `{criterion}` is outside [1, 5]")]
    ScoreOutOfRange { criterion: String, value: String },
    #[error("unsupported schema version `{0}` (expected \"1\")")]
    VersionMismatch(String),
    #[error("invalid assessment for `{criterion}`: {reason}")]
    InvalidAssessment { criterion: CriterionId, reason: String },

    #[error("AKOP set undefined for directional; supply explicitly")]
    UndefinedAkops,
    #[error("no knowledge-base entry for channel kind `{0}`")]
    NoKnowledgeBaseEntry(String),
    #[error("knowledge base: {0}")]
    KnowledgeBase(String),
    #[error("{0}")]
    InvalidInput(String),
    #[error("inconsistent invariance observations: {0}")]
    InconsistentInvariance(String),
    #[error("correlation undefined: {0} ranking has zero variance")]
    ZeroVariance(&'static str),

    #[error("no score sheets supplied")]
    NoSheets,
    #[error("every criterion is null; weighted average undefined")]
    AllNull,
    #[error("total weight of scored criteria is zero")]
    ZeroTotalWeight,
    #[error("sheets target different designs: `{0}` and `{1}`")]
    DesignMismatch(String, String),
    #[error("criterion `{0}` is null in some sheets but scored in others")]
    MixedNull(CriterionId),
    #[error("criterion `{0}` carries different weights across sheets")]
    WeightMismatch(CriterionId),
    #[error("consensus policy lacks an agreed score for `{0}`")]
    MissingConsensus(CriterionId),
    #[error("at least two reports are needed for a comparison")]
    TooFewReports,

    #[error("resulting pixel size {0:.3} is below 1 px")]
    PixelSizeTooSmall(f64),
    #[error("image: {0}")]
    Image(String),

    #[error("not found: {0}")]
    NotFound(String),
    #[error("revision conflict: expected {expected}, stored {actual}")]
    Conflict { expected: String, actual: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            Schema { .. }
            | UnknownCriterion(_)
            | MissingCriterion(_)
            | DuplicateCriterion(_)
            | ScoreOutOfRange { .. }
            | VersionMismatch(_)
            | InvalidAssessment { .. } => ErrorKind::Validation,
            UndefinedAkops
            | NoKnowledgeBaseEntry(_)
            | KnowledgeBase(_)
            | InvalidInput(_)
            | InconsistentInvariance(_)
            | ZeroVariance(_)
            | PixelSizeTooSmall(_) => ErrorKind::CriterionInput,
            NoSheets
            | AllNull
            | ZeroTotalWeight
            | DesignMismatch(..)
            | MixedNull(_)
            | WeightMismatch(_)
            | MissingConsensus(_)
            | TooFewReports => ErrorKind::Aggregation,
            NotFound(_) => ErrorKind::NotFound,
            Conflict { .. } => ErrorKind::Conflict,
            Image(_) | Io { .. } => ErrorKind::Io,
        }
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
