use thiserror::Error;

/// Errors produced by the lab.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("group mismatch: {0}")]
    GroupMismatch(String),

    #[error("invalid group descriptor: {0}")]
    InvalidGroup(String),

    #[error("invalid element {coords:?}: {reason}")]
    InvalidElem { coords: Vec<i64>, reason: String },

    #[error("empty set where a non-empty set is required: {0}")]
    EmptySet(String),

    #[error("index {index} outside the domain of sequence `{sequence}`")]
    IndexOutOfDomain { sequence: String, index: String },

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("tiling certificate invalid: {0}")]
    InvalidCert(String),

    #[error("indicator identity violated: {0}")]
    IndicatorIdentity(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    /// A theorem was requested outside its hypotheses. `hypothesis` names the
    /// missing assumption.
    #[error("hypothesis gate refused: {hypothesis}: {detail}")]
    GateRefused { hypothesis: String, detail: String },

    #[error("no witness within budget: {0}")]
    NoWitness(String),
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;
