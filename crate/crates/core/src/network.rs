//! The discrete Bayesian network model.
//!
//! A [`NetworkDraft`] is an unchecked candidate: any combination of variables,
//! edges and tables. [`validate_network`] reports everything wrong with it, and
//! [`Network::new`] turns a clean draft into an immutable [`Network`] that every
//! query runs against.
//!
//! CPT rows enumerate parent configurations row-major in the order the CPT
//! lists its parents, first parent varying slowest. Within a row, entries
//! follow the child's state order.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{BnError, Result};

/// Slack allowed when checking that a CPT row sums to one.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscreteVariable {
    pub id: String,
    pub label: String,
    pub states: Vec<String>,
}

impl DiscreteVariable {
    pub fn new<I, S>(id: &str, label: &str, states: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        DiscreteVariable {
            id: id.to_string(),
            label: label.to_string(),
            states: states.into_iter().map(Into::into).collect(),
        }
    }

    /// A two-state variable with states `true` then `false`.
    pub fn boolean(id: &str, label: &str) -> Self {
        Self::new(id, label, ["true", "false"])
    }

    pub fn cardinality(&self) -> usize {
        self.states.len()
    }

    pub fn state_index(&self, state: &str) -> Option<usize> {
        self.states.iter().position(|s| s == state)
    }

    pub fn is_boolean(&self) -> bool {
        self.states.len() == 2 && self.state_index("true").is_some() && self.state_index("false").is_some()
    }
}

/// Conditional probability table of one child given an ordered parent list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cpt {
    pub child: String,
    pub parents: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Cpt {
    pub fn new<S: Into<String>>(child: &str, parents: impl IntoIterator<Item = S>, rows: Vec<Vec<f64>>) -> Self {
        Cpt {
            child: child.to_string(),
            parents: parents.into_iter().map(Into::into).collect(),
            rows,
        }
    }

    /// A parentless table holding a single distribution.
    pub fn prior(child: &str, distribution: Vec<f64>) -> Self {
        Cpt {
            child: child.to_string(),
            parents: Vec::new(),
            rows: vec![distribution],
        }
    }
}

/// Row index of a parent configuration, first parent varying slowest.
pub fn row_index(parent_states: &[usize], parent_cards: &[usize]) -> usize {
    parent_states
        .iter()
        .zip(parent_cards)
        .fold(0, |acc, (&state, &card)| acc * card + state)
}

/// Inverse of [`row_index`].
pub fn row_configuration(mut row: usize, parent_cards: &[usize]) -> Vec<usize> {
    let mut states = vec![0; parent_cards.len()];
    for (slot, &card) in states.iter_mut().zip(parent_cards).rev() {
        *slot = row % card;
        row /= card;
    }
    states
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationCode {
    Cycle,
    OrphanEdge,
    DuplicateEdge,
    CptParentMismatch,
    RowNotNormalized,
    BadProbability,
    BadRowLength,
    BadVariable,
    DuplicateVariable,
    MissingCpt,
    DuplicateCpt,
    OrphanCpt,
}

impl ViolationCode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ViolationCode::Cycle => "CYCLE",
            ViolationCode::OrphanEdge => "ORPHAN_EDGE",
            ViolationCode::DuplicateEdge => "DUPLICATE_EDGE",
            ViolationCode::CptParentMismatch => "CPT_PARENT_MISMATCH",
            ViolationCode::RowNotNormalized => "ROW_NOT_NORMALIZED",
            ViolationCode::BadProbability => "BAD_PROBABILITY",
            ViolationCode::BadRowLength => "BAD_ROW_LENGTH",
            ViolationCode::BadVariable => "BAD_VARIABLE",
            ViolationCode::DuplicateVariable => "DUPLICATE_VARIABLE",
            ViolationCode::MissingCpt => "MISSING_CPT",
            ViolationCode::DuplicateCpt => "DUPLICATE_CPT",
            ViolationCode::OrphanCpt => "ORPHAN_CPT",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One problem found by [`validate_network`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub code: ViolationCode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variable: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edge: Option<(String, String)>,
    /// Index into the CPT's rows for row-level problems.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub row: Option<usize>,
    pub message: String,
}

impl Violation {
    fn on_variable(code: ViolationCode, variable: &str, message: String) -> Self {
        Violation {
            code,
            variable: Some(variable.to_string()),
            edge: None,
            row: None,
            message,
        }
    }

    fn on_edge(code: ViolationCode, edge: &(String, String), message: String) -> Self {
        Violation {
            code,
            variable: None,
            edge: Some(edge.clone()),
            row: None,
            message,
        }
    }

    fn on_row(code: ViolationCode, variable: &str, row: usize, message: String) -> Self {
        Violation {
            code,
            variable: Some(variable.to_string()),
            edge: None,
            row: Some(row),
            message,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, code: ViolationCode) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// An unchecked candidate network.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NetworkDraft {
    pub name: String,
    pub variables: Vec<DiscreteVariable>,
    pub edges: Vec<(String, String)>,
    pub cpts: Vec<Cpt>,
}

impl NetworkDraft {
    pub fn new(name: &str) -> Self {
        NetworkDraft {
            name: name.to_string(),
            ..Default::default()
        }
    }

    /// Adds a variable together with its table; edges are taken from the
    /// table's parent list.
    pub fn node(mut self, variable: DiscreteVariable, cpt: Cpt) -> Self {
        for parent in &cpt.parents {
            self.edges.push((parent.clone(), cpt.child.clone()));
        }
        self.variables.push(variable);
        self.cpts.push(cpt);
        self
    }

    pub fn build(self) -> Result<Network> {
        Network::new(self)
    }

    /// Topological order with ties broken by declaration order.
    pub fn topological_order(&self) -> Result<Vec<String>> {
        let index: HashMap<&str, usize> = self
            .variables
            .iter()
            .enumerate()
            .map(|(i, v)| (v.id.as_str(), i))
            .collect();
        let mut parents = vec![Vec::new(); self.variables.len()];
        for (p, c) in &self.edges {
            match (index.get(p.as_str()), index.get(c.as_str())) {
                (Some(&pi), Some(&ci)) => parents[ci].push(pi),
                (None, _) => return Err(BnError::UnknownVariable(p.clone())),
                (_, None) => return Err(BnError::UnknownVariable(c.clone())),
            }
        }
        match topo_indices(&parents) {
            Ok(order) => Ok(order.into_iter().map(|i| self.variables[i].id.clone()).collect()),
            Err(stuck) => Err(BnError::InvalidNetwork(ValidationReport {
                violations: vec![cycle_violation(&stuck, &self.variables)],
            })),
        }
    }
}

/// Kahn's algorithm with a min-heap on declaration index. On a cycle, returns
/// the indices that could not be ordered.
fn topo_indices(parents: &[Vec<usize>]) -> std::result::Result<Vec<usize>, Vec<usize>> {
    let n = parents.len();
    let mut indegree: Vec<usize> = parents.iter().map(Vec::len).collect();
    let mut children = vec![Vec::new(); n];
    for (c, ps) in parents.iter().enumerate() {
        for &p in ps {
            children[p].push(c);
        }
    }
    let mut ready: BinaryHeap<Reverse<usize>> = (0..n).filter(|&i| indegree[i] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(i)) = ready.pop() {
        order.push(i);
        for &c in &children[i] {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.push(Reverse(c));
            }
        }
    }
    if order.len() == n {
        Ok(order)
    } else {
        Err((0..n).filter(|&i| indegree[i] > 0).collect())
    }
}

fn cycle_violation(stuck: &[usize], variables: &[DiscreteVariable]) -> Violation {
    let names: Vec<&str> = stuck.iter().map(|&i| variables[i].id.as_str()).collect();
    Violation::on_variable(
        ViolationCode::Cycle,
        names[0],
        format!("directed cycle through {}", names.join(", ")),
    )
}

/// Checks every structural and numeric invariant of a candidate network.
pub fn validate_network(draft: &NetworkDraft) -> ValidationReport {
    let mut violations = Vec::new();

    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, var) in draft.variables.iter().enumerate() {
        if var.id.is_empty() || var.id.chars().any(char::is_whitespace) {
            violations.push(Violation::on_variable(
                ViolationCode::BadVariable,
                &var.id,
                format!("variable id `{}` must be non-empty without whitespace", var.id),
            ));
        }
        if index.insert(var.id.as_str(), i).is_some() {
            violations.push(Violation::on_variable(
                ViolationCode::DuplicateVariable,
                &var.id,
                format!("variable `{}` declared more than once", var.id),
            ));
        }
        if var.states.len() < 2 {
            violations.push(Violation::on_variable(
                ViolationCode::BadVariable,
                &var.id,
                format!("variable `{}` needs at least two states", var.id),
            ));
        }
        let mut seen = HashSet::new();
        for s in &var.states {
            if !seen.insert(s.as_str()) {
                violations.push(Violation::on_variable(
                    ViolationCode::BadVariable,
                    &var.id,
                    format!("state `{s}` repeated in variable `{}`", var.id),
                ));
            }
        }
    }

    let n = draft.variables.len();
    let mut graph_parents: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut seen_edges = HashSet::new();
    for edge in &draft.edges {
        let (p, c) = edge;
        let (Some(&pi), Some(&ci)) = (index.get(p.as_str()), index.get(c.as_str())) else {
            let missing = if index.contains_key(p.as_str()) { c } else { p };
            violations.push(Violation::on_edge(
                ViolationCode::OrphanEdge,
                edge,
                format!("edge {p} -> {c} references undeclared variable `{missing}`"),
            ));
            continue;
        };
        if !seen_edges.insert((pi, ci)) {
            violations.push(Violation::on_edge(
                ViolationCode::DuplicateEdge,
                edge,
                format!("edge {p} -> {c} listed more than once"),
            ));
            continue;
        }
        if pi == ci {
            violations.push(Violation::on_edge(
                ViolationCode::Cycle,
                edge,
                format!("self-loop on `{p}`"),
            ));
            continue;
        }
        graph_parents[ci].push(pi);
    }
    if let Err(stuck) = topo_indices(&graph_parents) {
        violations.push(cycle_violation(&stuck, &draft.variables));
    }

    let mut cpt_for: Vec<Option<&Cpt>> = vec![None; n];
    for cpt in &draft.cpts {
        let Some(&ci) = index.get(cpt.child.as_str()) else {
            violations.push(Violation::on_variable(
                ViolationCode::OrphanCpt,
                &cpt.child,
                format!("table for undeclared variable `{}`", cpt.child),
            ));
            continue;
        };
        if cpt_for[ci].is_some() {
            violations.push(Violation::on_variable(
                ViolationCode::DuplicateCpt,
                &cpt.child,
                format!("more than one table for `{}`", cpt.child),
            ));
            continue;
        }
        cpt_for[ci] = Some(cpt);
    }

    for (ci, var) in draft.variables.iter().enumerate() {
        let Some(cpt) = cpt_for[ci] else {
            violations.push(Violation::on_variable(
                ViolationCode::MissingCpt,
                &var.id,
                format!("no table for `{}`", var.id),
            ));
            continue;
        };
        let mut table_parents = Vec::with_capacity(cpt.parents.len());
        let mut parents_ok = true;
        for p in &cpt.parents {
            match index.get(p.as_str()) {
                Some(&pi) => table_parents.push(pi),
                None => {
                    parents_ok = false;
                    violations.push(Violation::on_variable(
                        ViolationCode::CptParentMismatch,
                        &var.id,
                        format!("table for `{}` lists undeclared parent `{p}`", var.id),
                    ));
                }
            }
        }
        if !parents_ok {
            continue;
        }
        let mut sorted_table = table_parents.clone();
        sorted_table.sort_unstable();
        let has_dup = sorted_table.windows(2).any(|w| w[0] == w[1]);
        let mut sorted_graph = graph_parents[ci].clone();
        sorted_graph.sort_unstable();
        sorted_graph.dedup();
        if has_dup || sorted_table != sorted_graph {
            violations.push(Violation::on_variable(
                ViolationCode::CptParentMismatch,
                &var.id,
                format!(
                    "table parents [{}] of `{}` differ from its graph parents [{}]",
                    cpt.parents.join(", "),
                    var.id,
                    sorted_graph
                        .iter()
                        .map(|&i| draft.variables[i].id.as_str())
                        .collect::<Vec<_>>()
                        .join(", ")
                ),
            ));
            continue;
        }
        let expected_rows: usize = table_parents
            .iter()
            .map(|&i| draft.variables[i].states.len())
            .product();
        if cpt.rows.len() != expected_rows {
            violations.push(Violation::on_variable(
                ViolationCode::BadRowLength,
                &var.id,
                format!(
                    "table for `{}` has {} rows, expected {}",
                    var.id,
                    cpt.rows.len(),
                    expected_rows
                ),
            ));
        }
        violations.extend(check_rows(&var.id, var.states.len(), &cpt.rows));
    }

    ValidationReport { violations }
}

fn check_rows(child: &str, card: usize, rows: &[Vec<f64>]) -> Vec<Violation> {
    let mut out = Vec::new();
    for (r, row) in rows.iter().enumerate() {
        if row.len() != card {
            out.push(Violation::on_row(
                ViolationCode::BadRowLength,
                child,
                r,
                format!("row {r} of `{child}` has {} entries, expected {card}", row.len()),
            ));
            continue;
        }
        if let Some(bad) = row.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            out.push(Violation::on_row(
                ViolationCode::BadProbability,
                child,
                r,
                format!("row {r} of `{child}` contains {bad}, outside [0, 1]"),
            ));
            continue;
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
            out.push(Violation::on_row(
                ViolationCode::RowNotNormalized,
                child,
                r,
                format!("row {r} of `{child}` sums to {sum}"),
            ));
        }
    }
    out
}

/// A validated, immutable discrete Bayesian network.
#[derive(Debug, Clone)]
pub struct Network {
    name: String,
    variables: Vec<DiscreteVariable>,
    /// Indexed like `variables`.
    cpts: Vec<Cpt>,
    /// Parent indices in CPT order.
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    index: HashMap<String, usize>,
}

impl PartialEq for Network {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.variables == other.variables && self.cpts == other.cpts
    }
}

impl Network {
    pub fn new(draft: NetworkDraft) -> Result<Network> {
        let report = validate_network(&draft);
        if !report.is_ok() {
            return Err(BnError::InvalidNetwork(report));
        }
        let index: HashMap<String, usize> = draft
            .variables
            .iter()
            .enumerate()
            .map(|(i, v)| (v.id.clone(), i))
            .collect();
        let mut by_child: HashMap<String, Cpt> = draft.cpts.into_iter().map(|c| (c.child.clone(), c)).collect();
        let cpts: Vec<Cpt> = draft
            .variables
            .iter()
            .map(|v| by_child.remove(&v.id).expect("validated: one table per variable"))
            .collect();
        let parents: Vec<Vec<usize>> = cpts
            .iter()
            .map(|c| c.parents.iter().map(|p| index[p]).collect())
            .collect();
        let mut children = vec![Vec::new(); draft.variables.len()];
        for (c, ps) in parents.iter().enumerate() {
            for &p in ps {
                children[p].push(c);
            }
        }
        Ok(Network {
            name: draft.name,
            variables: draft.variables,
            cpts,
            parents,
            children,
            index,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn variables(&self) -> &[DiscreteVariable] {
        &self.variables
    }

    pub fn variable(&self, index: usize) -> &DiscreteVariable {
        &self.variables[index]
    }

    pub fn variable_by_id(&self, id: &str) -> Option<&DiscreteVariable> {
        self.index.get(id).map(|&i| &self.variables[i])
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn require(&self, id: &str) -> Result<usize> {
        self.index_of(id).ok_or_else(|| BnError::UnknownVariable(id.to_string()))
    }

    pub fn cardinality(&self, index: usize) -> usize {
        self.variables[index].states.len()
    }

    pub fn cpts(&self) -> &[Cpt] {
        &self.cpts
    }

    pub fn cpt(&self, index: usize) -> &Cpt {
        &self.cpts[index]
    }

    pub fn parents(&self, index: usize) -> &[usize] {
        &self.parents[index]
    }

    pub fn children(&self, index: usize) -> &[usize] {
        &self.children[index]
    }

    /// Edges in canonical order: by child declaration order, then by the
    /// child's CPT parent order.
    pub fn edges(&self) -> Vec<(String, String)> {
        self.cpts
            .iter()
            .flat_map(|c| c.parents.iter().map(move |p| (p.clone(), c.child.clone())))
            .collect()
    }

    pub fn has_edge(&self, parent: &str, child: &str) -> bool {
        self.cpt_for(child).is_some_and(|c| c.parents.iter().any(|p| p == parent))
    }

    pub fn cpt_for(&self, id: &str) -> Option<&Cpt> {
        self.index_of(id).map(|i| &self.cpts[i])
    }

    /// The CPT row that applies to `index` under a full joint assignment.
    /// Entries of `assignment` for non-parents are ignored.
    pub fn conditional(&self, index: usize, assignment: &[usize]) -> &[f64] {
        let row = self.parents[index]
            .iter()
            .fold(0, |acc, &p| acc * self.cardinality(p) + assignment[p]);
        &self.cpts[index].rows[row]
    }

    pub fn to_draft(&self) -> NetworkDraft {
        NetworkDraft {
            name: self.name.clone(),
            variables: self.variables.clone(),
            edges: self.edges(),
            cpts: self.cpts.clone(),
        }
    }

    pub fn with_name(&self, name: &str) -> Network {
        let mut copy = self.clone();
        copy.name = name.to_string();
        copy
    }

    /// Resolves state names to `(variable index, state index)` pairs.
    pub fn resolve(&self, evidence: &Evidence) -> Result<Vec<(usize, usize)>> {
        evidence
            .iter()
            .map(|(var, state)| {
                let vi = self.require(var)?;
                let si = self.variables[vi]
                    .state_index(state)
                    .ok_or_else(|| BnError::UnknownState {
                        variable: var.to_string(),
                        state: state.to_string(),
                    })?;
                Ok((vi, si))
            })
            .collect()
    }

    pub fn state_index(&self, variable: &str, state: &str) -> Result<usize> {
        let vi = self.require(variable)?;
        self.variables[vi].state_index(state).ok_or_else(|| BnError::UnknownState {
            variable: variable.to_string(),
            state: state.to_string(),
        })
    }

    /// Ancestors of the given set, the set itself included.
    pub fn ancestral_set(&self, seeds: &[usize]) -> Vec<bool> {
        let mut marked = vec![false; self.len()];
        let mut stack: Vec<usize> = seeds.to_vec();
        while let Some(v) = stack.pop() {
            if !marked[v] {
                marked[v] = true;
                stack.extend(self.parents[v].iter().copied());
            }
        }
        marked
    }

    /// Descendants of `index`, itself included.
    pub fn descendants(&self, index: usize) -> Vec<bool> {
        let mut marked = vec![false; self.len()];
        let mut stack = vec![index];
        while let Some(v) = stack.pop() {
            if !marked[v] {
                marked[v] = true;
                stack.extend(self.children[v].iter().copied());
            }
        }
        marked
    }

    /// Largest absolute difference between corresponding CPT entries, or
    /// `None` when the two networks differ in structure.
    pub fn max_parameter_difference(&self, other: &Network) -> Option<f64> {
        if self.name != other.name || self.variables != other.variables {
            return None;
        }
        let mut worst: f64 = 0.0;
        for (a, b) in self.cpts.iter().zip(&other.cpts) {
            if a.child != b.child || a.parents != b.parents || a.rows.len() != b.rows.len() {
                return None;
            }
            for (ra, rb) in a.rows.iter().zip(&b.rows) {
                for (x, y) in ra.iter().zip(rb) {
                    worst = worst.max((x - y).abs());
                }
            }
        }
        Some(worst)
    }
}

/// Variable ids in topological order, ties broken by declaration order.
pub fn topological_order(network: &Network) -> Vec<String> {
    let order = topo_indices(&network.parents).expect("validated networks are acyclic");
    order.into_iter().map(|i| network.variables[i].id.clone()).collect()
}

/// Observed states, keyed by variable id.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Evidence(BTreeMap<String, String>);

impl Evidence {
    pub fn new() -> Self {
        Evidence::default()
    }

    pub fn from_pairs<I, K, V>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (K, V)>,
        K: Into<String>,
        V: Into<String>,
    {
        let mut evidence = Evidence::new();
        for (k, v) in pairs {
            evidence.insert(k, v)?;
        }
        Ok(evidence)
    }

    /// Fails when the variable is already assigned.
    pub fn insert(&mut self, variable: impl Into<String>, state: impl Into<String>) -> Result<()> {
        let variable = variable.into();
        if self.0.contains_key(&variable) {
            return Err(BnError::DuplicateAssignment(variable));
        }
        self.0.insert(variable, state.into());
        Ok(())
    }

    /// Copy of `self` with one more assignment.
    pub fn with(&self, variable: &str, state: &str) -> Result<Self> {
        let mut copy = self.clone();
        copy.insert(variable, state)?;
        Ok(copy)
    }

    pub fn get(&self, variable: &str) -> Option<&str> {
        self.0.get(variable).map(String::as_str)
    }

    pub fn contains(&self, variable: &str) -> bool {
        self.0.contains_key(variable)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }
}

impl fmt::Display for Evidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|(k, v)| format!("{k}={v}")).collect();
        f.write_str(&parts.join(", "))
    }
}
