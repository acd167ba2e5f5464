use jsonc_parser::ast::Object;

use super::json::Source;
use super::ParseError;
use crate::causal::{apply_interventions, Intervention};
use crate::error::{BnError, Result};
use crate::inference::{query_posterior, QueryResult};
use crate::network::{Evidence, Network};

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct ScenarioQuery {
    pub target: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
}

/// A model reference plus the evidence, interventions and queries to run on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    /// Path of the model file, relative to the scenario file.
    pub model: String,
    pub label: String,
    pub evidence: Evidence,
    pub interventions: Vec<Intervention>,
    pub queries: Vec<ScenarioQuery>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ScenarioOutcome {
    pub query: ScenarioQuery,
    pub result: QueryResult,
}

fn assignments<'t>(src: &Source<'t>, obj: &Object<'t>, what: &str) -> std::result::Result<Vec<(String, String, jsonc_parser::common::Range)>, ParseError> {
    obj.properties
        .iter()
        .map(|p| Ok((p.name.as_str().to_string(), src.string(&p.value, what)?, p.range)))
        .collect()
}

/// Parses a scenario file. Variable names are checked against the model only
/// when the scenario runs.
pub fn parse_scenario(bytes: &[u8]) -> std::result::Result<Scenario, ParseError> {
    let src = Source::from_bytes(bytes)?;
    let value = src.parse()?;
    let root = src.object(&value, "scenario")?;
    src.only_keys(root, &["format_version", "model", "label", "evidence", "do", "queries"], "scenario")?;
    src.check_version(root, 1)?;
    let model = src.string(src.required(root, "model", "scenario")?, "model")?;
    let label = match root.get("label") {
        Some(p) => src.string(&p.value, "label")?,
        None => String::new(),
    };

    let mut evidence = Evidence::new();
    if let Some(p) = root.get("evidence") {
        let obj = src.object(&p.value, "evidence")?;
        for (var, state, range) in assignments(&src, obj, "evidence state")? {
            evidence
                .insert(var.clone(), state)
                .map_err(|_| src.error("DUPLICATE_ASSIGNMENT", range, format!("`{var}` observed twice")))?;
        }
    }

    let mut interventions = Vec::new();
    if let Some(p) = root.get("do") {
        let obj = src.object(&p.value, "do")?;
        for (var, state, range) in assignments(&src, obj, "intervention state")? {
            if evidence.contains(&var) {
                return Err(src.error(
                    "DUPLICATE_ASSIGNMENT",
                    range,
                    format!("`{var}` is both observed and intervened on"),
                ));
            }
            interventions.push(Intervention { variable: var, state });
        }
    }

    let mut queries = Vec::new();
    if let Some(p) = root.get("queries") {
        for q in &src.array(&p.value, "queries")?.elements {
            let obj = src.object(q, "query")?;
            src.only_keys(obj, &["target", "state"], "query")?;
            let target = src.string(src.required(obj, "target", "query")?, "target")?;
            let state = match obj.get("state") {
                Some(s) => Some(src.string(&s.value, "state")?),
                None => None,
            };
            queries.push(ScenarioQuery { target, state });
        }
    }

    Ok(Scenario {
        model,
        label,
        evidence,
        interventions,
        queries,
    })
}

/// Runs every query of the scenario. With no queries, every variable that is
/// neither observed nor intervened on is queried.
pub fn run_scenario(network: &Network, scenario: &Scenario) -> Result<Vec<ScenarioOutcome>> {
    for i in &scenario.interventions {
        if scenario.evidence.contains(&i.variable) {
            return Err(BnError::DuplicateAssignment(i.variable.clone()));
        }
    }
    let mutilated = apply_interventions(network, &scenario.interventions)?;
    let fixed = |id: &str| scenario.evidence.contains(id) || scenario.interventions.iter().any(|i| i.variable == id);
    let queries: Vec<ScenarioQuery> = if scenario.queries.is_empty() {
        network
            .variables()
            .iter()
            .filter(|v| !fixed(&v.id))
            .map(|v| ScenarioQuery {
                target: v.id.clone(),
                state: None,
            })
            .collect()
    } else {
        scenario.queries.clone()
    };
    queries
        .into_iter()
        .map(|query| {
            if scenario.interventions.iter().any(|i| i.variable == query.target) {
                return Err(BnError::TargetIntervened(query.target.clone()));
            }
            if let Some(state) = &query.state {
                network.state_index(&query.target, state)?;
            }
            let result = query_posterior(&mutilated, &scenario.evidence, &query.target)?;
            Ok(ScenarioOutcome { query, result })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_scenario() {
        let text = r#"{"format_version": 1, "model": "simple-smoking.json", "label": "fig 6 (ii)",
            "evidence": {"tested": "true"}, "do": {"smoker": "false"},
            "queries": [{"target": "covid19"}, {"target": "covid19", "state": "true"}]}"#;
        let s = parse_scenario(text.as_bytes()).unwrap();
        assert_eq!(s.evidence.get("tested"), Some("true"));
        assert_eq!(s.interventions, vec![Intervention::new("smoker", "false")]);
        assert_eq!(s.queries.len(), 2);
        assert_eq!(s.queries[1].state.as_deref(), Some("true"));
    }

    #[test]
    fn contradiction_is_a_duplicate_assignment() {
        let text = r#"{"format_version": 1, "model": "m.json",
            "evidence": {"stress": "false"}, "do": {"stress": "true"}}"#;
        let err = parse_scenario(text.as_bytes()).unwrap_err();
        assert_eq!(err.code, "DUPLICATE_ASSIGNMENT");
        assert_eq!(err.line, 2);
    }

    #[test]
    fn minimal_scenario_is_valid() {
        let s = parse_scenario(br#"{"format_version": 1, "model": "m.json"}"#).unwrap();
        assert!(s.evidence.is_empty() && s.interventions.is_empty() && s.queries.is_empty());
        assert!(parse_scenario(b"{}").is_err());
        assert_eq!(parse_scenario(b"[").unwrap_err().code, "SYNTAX");
    }
}
