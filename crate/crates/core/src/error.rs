use thiserror::Error;

use crate::network::ValidationReport;

pub type Result<T> = std::result::Result<T, BnError>;

/// Errors raised by queries, factor algebra, graph surgery and estimation.
///
/// Every variant maps to a stable upper-case code (see [`BnError::code`]) that
/// the CLI and HTTP layers surface verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BnError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("`{state}` is not a state of `{variable}`")]
    UnknownState { variable: String, state: String },

    #[error("variable `{0}` is assigned more than once")]
    DuplicateAssignment(String),

    #[error("the evidence has probability zero, no posterior exists")]
    ImpossibleEvidence,

    #[error("target `{0}` is also observed as evidence")]
    TargetInEvidence(String),

    #[error("target `{0}` is fixed by an intervention")]
    TargetIntervened(String),

    #[error("joint state space has {size} configurations, above the cap of {cap}")]
    StateSpaceTooLarge { size: u128, cap: u128 },

    #[error("variable `{variable}` has {left} states in one factor and {right} in the other")]
    StateSpaceMismatch {
        variable: String,
        left: usize,
        right: usize,
    },

    #[error("variable `{0}` is not in the factor scope")]
    NotInScope(String),

    #[error("invalid factor: {0}")]
    InvalidFactor(String),

    #[error("invalid network: {0}")]
    InvalidNetwork(ValidationReport),

    #[error("more than {0} simple paths between the endpoints")]
    PathLimit(usize),

    #[error("{0}")]
    InvalidArgument(String),

    #[error("no records for configuration {row} of `{child}` and smoothing is zero")]
    EmptyConfiguration { child: String, row: usize },

    #[error("column `{0}` is missing from the record table")]
    MissingColumn(String),

    #[error("record line {line}: {message}")]
    BadRecord { line: u64, message: String },
}

impl BnError {
    pub fn code(&self) -> &'static str {
        match self {
            BnError::UnknownVariable(_) => "UNKNOWN_VARIABLE",
            BnError::UnknownState { .. } => "UNKNOWN_STATE",
            BnError::DuplicateAssignment(_) => "DUPLICATE_ASSIGNMENT",
            BnError::ImpossibleEvidence => "IMPOSSIBLE_EVIDENCE",
            BnError::TargetInEvidence(_) => "TARGET_IN_EVIDENCE",
            BnError::TargetIntervened(_) => "TARGET_INTERVENED",
            BnError::StateSpaceTooLarge { .. } => "STATE_SPACE_TOO_LARGE",
            BnError::StateSpaceMismatch { .. } => "STATE_SPACE_MISMATCH",
            BnError::NotInScope(_) => "NOT_IN_SCOPE",
            BnError::InvalidFactor(_) => "INVALID_FACTOR",
            BnError::InvalidNetwork(report) => report
                .violations
                .first()
                .map(|v| v.code.as_str())
                .unwrap_or("INVALID_NETWORK"),
            BnError::PathLimit(_) => "PATH_LIMIT",
            BnError::InvalidArgument(_) => "INVALID_ARGUMENT",
            BnError::EmptyConfiguration { .. } => "EMPTY_CONFIGURATION",
            BnError::MissingColumn(_) => "MISSING_COLUMN",
            BnError::BadRecord { .. } => "BAD_RECORD",
        }
    }
}
