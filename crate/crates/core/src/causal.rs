//! Graph surgery, d-separation, path classification and the selection-bias audit.

use std::collections::VecDeque;
use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{BnError, Result};
use crate::inference::{query_posterior, QueryResult};
use crate::network::{Cpt, Evidence, Network};

/// Upper bound on simple paths enumerated by [`classify_paths`].
pub const DEFAULT_PATH_LIMIT: usize = 10_000;

/// `do(variable = state)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Intervention {
    pub variable: String,
    pub state: String,
}

impl Intervention {
    pub fn new(variable: &str, state: &str) -> Self {
        Intervention {
            variable: variable.to_string(),
            state: state.to_string(),
        }
    }
}

impl fmt::Display for Intervention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "do({}={})", self.variable, self.state)
    }
}

/// Mutilated copy of `network`: every edge into the intervened variable is cut
/// and its table becomes a point mass on the chosen state.
pub fn apply_do(network: &Network, intervention: &Intervention) -> Result<Network> {
    let vi = network.require(&intervention.variable)?;
    let si = network.state_index(&intervention.variable, &intervention.state)?;
    let mut draft = network.to_draft();
    draft.edges.retain(|(_, child)| child != &intervention.variable);
    let mut point = vec![0.0; network.cardinality(vi)];
    point[si] = 1.0;
    draft.cpts[vi] = Cpt::prior(&intervention.variable, point);
    Network::new(draft)
}

pub fn apply_interventions(network: &Network, interventions: &[Intervention]) -> Result<Network> {
    let mut seen: Vec<&str> = Vec::new();
    let mut out = network.clone();
    for i in interventions {
        if seen.contains(&i.variable.as_str()) {
            return Err(BnError::DuplicateAssignment(i.variable.clone()));
        }
        seen.push(&i.variable);
        out = apply_do(&out, i)?;
    }
    Ok(out)
}

/// P(target | do(intervention), evidence).
pub fn interventional_query(
    network: &Network,
    intervention: &Intervention,
    evidence: &Evidence,
    target: &str,
) -> Result<QueryResult> {
    interventional_query_many(network, std::slice::from_ref(intervention), evidence, target)
}

pub fn interventional_query_many(
    network: &Network,
    interventions: &[Intervention],
    evidence: &Evidence,
    target: &str,
) -> Result<QueryResult> {
    for i in interventions {
        if evidence.contains(&i.variable) {
            return Err(BnError::DuplicateAssignment(i.variable.clone()));
        }
        if i.variable == target {
            return Err(BnError::TargetIntervened(target.to_string()));
        }
    }
    let mutilated = apply_interventions(network, interventions)?;
    query_posterior(&mutilated, evidence, target)
}

fn distinct_endpoints(network: &Network, x: &str, y: &str, given: &[&str]) -> Result<(usize, usize, Vec<bool>)> {
    let xi = network.require(x)?;
    let yi = network.require(y)?;
    if xi == yi {
        return Err(BnError::InvalidArgument(format!("endpoints must differ, got `{x}` twice")));
    }
    let mut in_given = vec![false; network.len()];
    for g in given {
        in_given[network.require(g)?] = true;
    }
    if in_given[xi] || in_given[yi] {
        return Err(BnError::InvalidArgument(
            "endpoints must not be in the conditioning set".to_string(),
        ));
    }
    Ok((xi, yi, in_given))
}

/// Whether `x` and `y` are d-separated by `given`.
///
/// Reachability in the style of Bayes-ball: a trail may pass a non-collider
/// only if it is unobserved, and a collider only if it is an ancestor of (or
/// in) the conditioning set.
pub fn d_separated(network: &Network, x: &str, y: &str, given: &[&str]) -> Result<bool> {
    let (xi, yi, in_given) = distinct_endpoints(network, x, y, given)?;
    let seeds: Vec<usize> = (0..network.len()).filter(|&i| in_given[i]).collect();
    let ancestor_of_given = network.ancestral_set(&seeds);

    // direction: true when the trail arrived from a child (moving up)
    let mut visited = vec![[false; 2]; network.len()];
    let mut queue = VecDeque::from([(xi, true)]);
    while let Some((v, up)) = queue.pop_front() {
        if visited[v][up as usize] {
            continue;
        }
        visited[v][up as usize] = true;
        if v == yi {
            return Ok(false);
        }
        if up {
            if !in_given[v] {
                queue.extend(network.parents(v).iter().map(|&p| (p, true)));
                queue.extend(network.children(v).iter().map(|&c| (c, false)));
            }
        } else {
            if !in_given[v] {
                queue.extend(network.children(v).iter().map(|&c| (c, false)));
            }
            if ancestor_of_given[v] {
                queue.extend(network.parents(v).iter().map(|&p| (p, true)));
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeDirection {
    /// Arrow points from the earlier path node to the later one.
    Forward,
    Backward,
}

impl EdgeDirection {
    pub fn arrow(&self) -> &'static str {
        match self {
            EdgeDirection::Forward => "->",
            EdgeDirection::Backward => "<-",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum NodeRole {
    Chain,
    /// Common cause of its two path neighbours.
    Fork,
    /// Common effect of its two path neighbours.
    Collider,
}

impl NodeRole {
    pub fn as_str(&self) -> &'static str {
        match self {
            NodeRole::Chain => "CHAIN",
            NodeRole::Fork => "FORK",
            NodeRole::Collider => "COLLIDER",
        }
    }
}

/// One simple undirected path between an exposure and an outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathReport {
    pub nodes: Vec<String>,
    /// `directions[i]` is the edge between `nodes[i]` and `nodes[i + 1]`.
    pub directions: Vec<EdgeDirection>,
    /// One role per interior node.
    pub node_roles: Vec<NodeRole>,
    pub open_given: bool,
}

impl PathReport {
    /// Alternating node ids and arrows, e.g. `smoker -> tested <- covid19`.
    pub fn tokens(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(self.nodes.len() * 2);
        for (i, node) in self.nodes.iter().enumerate() {
            if i > 0 {
                out.push(self.directions[i - 1].arrow().to_string());
            }
            out.push(node.clone());
        }
        out
    }

    pub fn interior(&self) -> &[String] {
        &self.nodes[1..self.nodes.len() - 1]
    }

    pub fn role_of(&self, node: &str) -> Option<NodeRole> {
        self.interior()
            .iter()
            .position(|n| n == node)
            .map(|i| self.node_roles[i])
    }
}

impl fmt::Display for PathReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tokens().join(" "))
    }
}

impl Serialize for PathReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("PathReport", 3)?;
        s.serialize_field("path", &self.tokens())?;
        s.serialize_field("node_roles", &self.node_roles)?;
        s.serialize_field("open_given", &self.open_given)?;
        s.end()
    }
}

pub fn classify_paths(network: &Network, exposure: &str, outcome: &str, given: &[&str]) -> Result<Vec<PathReport>> {
    classify_paths_with_limit(network, exposure, outcome, given, DEFAULT_PATH_LIMIT)
}

/// Every simple path of the skeleton between `exposure` and `outcome`, with
/// interior nodes labelled by local arrow orientation. Shortest paths first,
/// then lexicographic by node ids.
pub fn classify_paths_with_limit(
    network: &Network,
    exposure: &str,
    outcome: &str,
    given: &[&str],
    limit: usize,
) -> Result<Vec<PathReport>> {
    let xi = network.require(exposure)?;
    let yi = network.require(outcome)?;
    if xi == yi {
        return Err(BnError::InvalidArgument(format!(
            "exposure and outcome must differ, got `{exposure}` twice"
        )));
    }
    let mut in_given = vec![false; network.len()];
    for g in given {
        in_given[network.require(g)?] = true;
    }

    // skeleton neighbours in declaration order, tagged with the arrow direction
    let neighbours: Vec<Vec<(usize, EdgeDirection)>> = (0..network.len())
        .map(|v| {
            let mut ns: Vec<(usize, EdgeDirection)> = network
                .children(v)
                .iter()
                .map(|&c| (c, EdgeDirection::Forward))
                .chain(network.parents(v).iter().map(|&p| (p, EdgeDirection::Backward)))
                .collect();
            ns.sort_by_key(|&(u, _)| u);
            ns
        })
        .collect();

    let mut raw: Vec<(Vec<usize>, Vec<EdgeDirection>)> = Vec::new();
    let mut on_path = vec![false; network.len()];
    let mut nodes = vec![xi];
    let mut dirs = Vec::new();
    on_path[xi] = true;
    walk(&neighbours, yi, &mut on_path, &mut nodes, &mut dirs, &mut raw, limit)?;

    let mut reports: Vec<PathReport> = raw
        .into_iter()
        .map(|(nodes, directions)| {
            let mut roles = Vec::with_capacity(nodes.len().saturating_sub(2));
            let mut open = true;
            for i in 1..nodes.len() - 1 {
                let role = match (directions[i - 1], directions[i]) {
                    (EdgeDirection::Forward, EdgeDirection::Backward) => NodeRole::Collider,
                    (EdgeDirection::Backward, EdgeDirection::Forward) => NodeRole::Fork,
                    _ => NodeRole::Chain,
                };
                let passes = match role {
                    NodeRole::Collider => {
                        let desc = network.descendants(nodes[i]);
                        (0..network.len()).any(|d| desc[d] && in_given[d])
                    }
                    _ => !in_given[nodes[i]],
                };
                open &= passes;
                roles.push(role);
            }
            PathReport {
                nodes: nodes.iter().map(|&i| network.variable(i).id.clone()).collect(),
                directions,
                node_roles: roles,
                open_given: open,
            }
        })
        .collect();
    reports.sort_by(|a, b| a.nodes.len().cmp(&b.nodes.len()).then_with(|| a.nodes.cmp(&b.nodes)));
    Ok(reports)
}

fn walk(
    neighbours: &[Vec<(usize, EdgeDirection)>],
    target: usize,
    on_path: &mut [bool],
    nodes: &mut Vec<usize>,
    dirs: &mut Vec<EdgeDirection>,
    out: &mut Vec<(Vec<usize>, Vec<EdgeDirection>)>,
    limit: usize,
) -> Result<()> {
    let here = *nodes.last().expect("path starts non-empty");
    if here == target {
        if out.len() >= limit {
            return Err(BnError::PathLimit(limit));
        }
        out.push((nodes.clone(), dirs.clone()));
        return Ok(());
    }
    for &(next, dir) in &neighbours[here] {
        if on_path[next] {
            continue;
        }
        on_path[next] = true;
        nodes.push(next);
        dirs.push(dir);
        walk(neighbours, target, on_path, nodes, dirs, out, limit)?;
        dirs.pop();
        nodes.pop();
        on_path[next] = false;
    }
    Ok(())
}

/// Inputs of [`audit_bias`]. Unset states default to `true` / (`true`, `false`)
/// for Boolean variables.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditSpec {
    pub exposure: String,
    pub outcome: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome_state: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exposure_states: Option<(String, String)>,
    #[serde(default)]
    pub selection: Evidence,
}

impl AuditSpec {
    pub fn new(exposure: &str, outcome: &str) -> Self {
        AuditSpec {
            exposure: exposure.to_string(),
            outcome: outcome.to_string(),
            ..Default::default()
        }
    }

    pub fn outcome_state(mut self, state: &str) -> Self {
        self.outcome_state = Some(state.to_string());
        self
    }

    pub fn exposure_states(mut self, e1: &str, e0: &str) -> Self {
        self.exposure_states = Some((e1.to_string(), e0.to_string()));
        self
    }

    pub fn selection(mut self, selection: Evidence) -> Self {
        self.selection = selection;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasAuditReport {
    pub exposure: String,
    pub outcome: String,
    pub exposure_states: (String, String),
    pub outcome_state: String,
    pub selection: Evidence,
    /// P(outcome | e1, selection) and P(outcome | e0, selection).
    pub selected_probabilities: (f64, f64),
    pub population_probabilities: (f64, f64),
    pub interventional_probabilities: (f64, f64),
    pub selected_contrast: f64,
    pub population_contrast: f64,
    pub interventional_contrast: f64,
    pub paths_unconditioned: Vec<PathReport>,
    pub paths_given_selection: Vec<PathReport>,
    /// Selected and interventional contrasts have strictly opposite signs.
    pub reversal: bool,
}

fn default_state(network: &Network, variable: &str, role: &str) -> Result<String> {
    let vi = network.require(variable)?;
    if network.variable(vi).is_boolean() {
        Ok("true".to_string())
    } else {
        Err(BnError::InvalidArgument(format!(
            "{role} `{variable}` is not Boolean; its states must be given explicitly"
        )))
    }
}

/// Contrasts the exposure's association with the outcome under selection,
/// in the whole population, and under intervention.
pub fn audit_bias(network: &Network, spec: &AuditSpec) -> Result<BiasAuditReport> {
    let exposure = spec.exposure.as_str();
    let outcome = spec.outcome.as_str();
    network.require(exposure)?;
    network.require(outcome)?;
    if exposure == outcome {
        return Err(BnError::InvalidArgument("exposure and outcome must differ".to_string()));
    }
    for v in [exposure, outcome] {
        if spec.selection.contains(v) {
            return Err(BnError::InvalidArgument(format!("`{v}` cannot be part of the selection")));
        }
    }
    network.resolve(&spec.selection)?;

    let outcome_state = match &spec.outcome_state {
        Some(s) => s.clone(),
        None => default_state(network, outcome, "outcome")?,
    };
    network.state_index(outcome, &outcome_state)?;
    let (e1, e0) = match &spec.exposure_states {
        Some(pair) => pair.clone(),
        None => {
            default_state(network, exposure, "exposure")?;
            ("true".to_string(), "false".to_string())
        }
    };
    network.state_index(exposure, &e1)?;
    network.state_index(exposure, &e0)?;

    let observed = |base: &Evidence, e: &str| -> Result<f64> {
        let ev = base.with(exposure, e)?;
        let r = query_posterior(network, &ev, outcome)?;
        Ok(r.probability_of(&outcome_state).expect("state checked"))
    };
    let intervened = |e: &str| -> Result<f64> {
        let r = interventional_query(network, &Intervention::new(exposure, e), &Evidence::new(), outcome)?;
        Ok(r.probability_of(&outcome_state).expect("state checked"))
    };

    let selected = (observed(&spec.selection, &e1)?, observed(&spec.selection, &e0)?);
    let population = (observed(&Evidence::new(), &e1)?, observed(&Evidence::new(), &e0)?);
    let interventional = (intervened(&e1)?, intervened(&e0)?);

    let selected_contrast = selected.0 - selected.1;
    let interventional_contrast = interventional.0 - interventional.1;
    let selection_vars: Vec<&str> = spec.selection.variables().collect();

    Ok(BiasAuditReport {
        exposure: exposure.to_string(),
        outcome: outcome.to_string(),
        exposure_states: (e1, e0),
        outcome_state,
        selection: spec.selection.clone(),
        selected_probabilities: selected,
        population_probabilities: population,
        interventional_probabilities: interventional,
        selected_contrast,
        population_contrast: population.0 - population.1,
        interventional_contrast,
        paths_unconditioned: classify_paths(network, exposure, outcome, &[])?,
        paths_given_selection: classify_paths(network, exposure, outcome, &selection_vars)?,
        reversal: selected_contrast * interventional_contrast < 0.0,
    })
}
