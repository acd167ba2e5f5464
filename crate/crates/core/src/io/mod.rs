//! Model, skeleton and scenario documents, and CPT estimation from records.
//!
//! All documents are UTF-8 JSON. Parse failures carry a 1-based line and
//! column pointing at the offending token.

mod json;
mod model;
mod records;
mod scenario;

use std::fmt;

use serde::Serialize;

pub use model::{
    format_probability, parse_model, parse_model_document, parse_skeleton, serialize_model,
    serialize_model_with_metadata, ModelDocument, Skeleton, FORMAT_VERSION,
};
pub use records::{cpt_from_counts, fit_network, RecordTable};
pub use scenario::{parse_scenario, run_scenario, Scenario, ScenarioOutcome, ScenarioQuery};

/// A positioned diagnostic from one of the document parsers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParseError {
    /// `SYNTAX`, `UNKNOWN_VARIABLE`, `BAD_ROW_LENGTH`, `DUPLICATE_ASSIGNMENT`
    /// or one of the network validation codes.
    pub code: String,
    pub message: String,
    pub line: usize,
    pub column: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub token: Option<String>,
    /// CPT row index for row-level problems.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub row: Option<usize>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}: {}", self.line, self.column, self.code, self.message)?;
        if let Some(token) = &self.token {
            write!(f, " (at `{token}`)")?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}
