use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// One entry per broken scenario invariant.
    #[error("invalid scenario: {}", .0.join("; "))]
    InvalidScenario(Vec<String>),

    #[error("scenario document: {0}")]
    Config(String),

    #[error("{0}")]
    Domain(String),

    #[error("audit refused: assumption {assumption} fails ({detail})")]
    AuditRefused { assumption: String, detail: String },

    #[error("{which} threshold unreachable at K = {k}")]
    ThresholdUnreachable { which: &'static str, k: f64 },

    #[error("tier ordering violated at K = {k}: {detail}")]
    TierOrdering { k: f64, detail: String },

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("non-finite value at x = {x}")]
    NonFinite { x: f64 },

    #[error("cost {c} lies outside the interior cost set ({lo}, {hi})")]
    OutsideInteriorCostSet { c: f64, lo: f64, hi: f64 },

    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(String),

    #[error("duplicate judgment: {0}")]
    DuplicateJudgment(String),

    #[error("unknown skill id `{0}`")]
    UnknownSkill(String),

    #[error("pca: {0}")]
    Pca(String),

    #[error("bootstrap: {0}")]
    Bootstrap(String),

    #[error("malformed grid `{spec}`: {reason}")]
    Grid { spec: String, reason: String },
}

impl Error {
    /// Validation and audit refusals, as opposed to internal failures.
    pub fn is_refusal(&self) -> bool {
        !matches!(self, Error::Inconsistent(_) | Error::NonFinite { .. })
    }
}
