use std::collections::HashMap;
use std::fmt::Write as _;

use indexmap::IndexMap;
use jsonc_parser::ast::Value;
use jsonc_parser::common::Range;

use super::json::{range_of, Source};
use super::ParseError;
use crate::network::{validate_network, Cpt, DiscreteVariable, Network, NetworkDraft, Violation, ViolationCode};

pub const FORMAT_VERSION: u32 = 1;

/// A parsed model file: the network plus free-form metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelDocument {
    pub format_version: u32,
    pub network: Network,
    pub metadata: IndexMap<String, serde_json::Value>,
}

/// Structure of a network without fitted parameters. The wrapped network
/// carries uniform placeholder rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Skeleton {
    pub network: Network,
}

struct RawVariable {
    variable: DiscreteVariable,
    id_range: Range,
}

struct RawCpt {
    cpt: Cpt,
    range: Range,
    child_range: Range,
    parent_ranges: Vec<Range>,
    rows_range: Range,
    row_ranges: Vec<Range>,
}

struct RawEdge {
    edge: (String, String),
    range: Range,
    ends: [Range; 2],
}

struct RawDocument {
    name: String,
    variables: Vec<RawVariable>,
    edges: Vec<RawEdge>,
    cpts: Vec<RawCpt>,
    metadata: IndexMap<String, serde_json::Value>,
    root: Range,
}

fn read_document(src: &Source<'_>, skeleton: bool) -> Result<RawDocument, ParseError> {
    let value = src.parse()?;
    let root = src.object(&value, "document")?;
    src.only_keys(root, &["format_version", "name", "variables", "edges", "cpts", "metadata"], "document")?;
    src.check_version(root, FORMAT_VERSION)?;
    let name = src.string(src.required(root, "name", "document")?, "name")?;

    let mut variables = Vec::new();
    for v in &src.array(src.required(root, "variables", "document")?, "variables")?.elements {
        let obj = src.object(v, "variable")?;
        src.only_keys(obj, &["id", "label", "states"], "variable")?;
        let id_value = src.required(obj, "id", "variable")?;
        let id = src.string(id_value, "variable id")?;
        let label = match obj.get("label") {
            Some(p) => src.string(&p.value, "label")?,
            None => id.clone(),
        };
        let states = src
            .array(src.required(obj, "states", "variable")?, "states")?
            .elements
            .iter()
            .map(|s| src.string(s, "state"))
            .collect::<Result<Vec<_>, _>>()?;
        variables.push(RawVariable {
            variable: DiscreteVariable { id, label, states },
            id_range: range_of(id_value),
        });
    }

    let mut edges = Vec::new();
    if let Some(p) = root.get("edges") {
        for e in &src.array(&p.value, "edges")?.elements {
            let pair = src.array(e, "edge")?;
            if pair.elements.len() != 2 {
                return Err(src.syntax(pair.range, "an edge is a [parent, child] pair"));
            }
            edges.push(RawEdge {
                edge: (
                    src.string(&pair.elements[0], "edge parent")?,
                    src.string(&pair.elements[1], "edge child")?,
                ),
                range: pair.range,
                ends: [range_of(&pair.elements[0]), range_of(&pair.elements[1])],
            });
        }
    } else if !skeleton {
        src.required(root, "edges", "document")?;
    }

    let mut cpts = Vec::new();
    let cpt_values: &[Value<'_>] = match root.get("cpts") {
        Some(p) => &src.array(&p.value, "cpts")?.elements,
        None if skeleton => &[],
        None => {
            src.required(root, "cpts", "document")?;
            &[]
        }
    };
    for c in cpt_values {
        let obj = src.object(c, "cpt")?;
        src.only_keys(obj, &["child", "parents", "rows"], "cpt")?;
        let child_value = src.required(obj, "child", "cpt")?;
        let child = src.string(child_value, "cpt child")?;
        let mut parents = Vec::new();
        let mut parent_ranges = Vec::new();
        if let Some(p) = obj.get("parents") {
            for pv in &src.array(&p.value, "parents")?.elements {
                parents.push(src.string(pv, "parent")?);
                parent_ranges.push(range_of(pv));
            }
        }
        let mut rows = Vec::new();
        let mut row_ranges = Vec::new();
        let rows_range = match obj.get("rows") {
            Some(p) => {
                for rv in &src.array(&p.value, "rows")?.elements {
                    let row = src.array(rv, "row")?;
                    rows.push(
                        row.elements
                            .iter()
                            .map(|x| src.number(x, "probability"))
                            .collect::<Result<Vec<_>, _>>()?,
                    );
                    row_ranges.push(row.range);
                }
                range_of(&p.value)
            }
            None if skeleton => obj.range,
            None => return Err(src.syntax(obj.range, format!("cpt for `{child}` is missing `rows`"))),
        };
        cpts.push(RawCpt {
            cpt: Cpt { child, parents, rows },
            range: obj.range,
            child_range: range_of(child_value),
            parent_ranges,
            rows_range,
            row_ranges,
        });
    }

    let mut metadata = IndexMap::new();
    if let Some(p) = root.get("metadata") {
        let obj = src.object(&p.value, "metadata")?;
        for prop in &obj.properties {
            let raw = src.slice(range_of(&prop.value));
            let value: serde_json::Value =
                serde_json::from_str(raw).map_err(|e| src.syntax(range_of(&prop.value), e.to_string()))?;
            metadata.insert(prop.name.as_str().to_string(), value);
        }
    }

    Ok(RawDocument {
        name,
        variables,
        edges,
        cpts,
        metadata,
        root: root.range,
    })
}

fn unknown(src: &Source<'_>, range: Range, id: &str, context: &str) -> ParseError {
    src.error("UNKNOWN_VARIABLE", range, format!("{context} references undeclared variable `{id}`"))
}

/// Resolves references and validates; every failure is positioned.
fn build(src: &Source<'_>, doc: RawDocument) -> Result<Network, ParseError> {
    let mut cards: HashMap<&str, usize> = HashMap::new();
    for v in &doc.variables {
        cards.entry(v.variable.id.as_str()).or_insert(v.variable.states.len());
    }

    for e in &doc.edges {
        for (id, range) in [(&e.edge.0, e.ends[0]), (&e.edge.1, e.ends[1])] {
            if !cards.contains_key(id.as_str()) {
                return Err(unknown(src, range, id, "edge"));
            }
        }
    }
    for c in &doc.cpts {
        if !cards.contains_key(c.cpt.child.as_str()) {
            return Err(unknown(src, c.child_range, &c.cpt.child, "cpt"));
        }
        for (p, range) in c.cpt.parents.iter().zip(&c.parent_ranges) {
            if !cards.contains_key(p.as_str()) {
                return Err(unknown(src, *range, p, "cpt parent list"));
            }
        }
        let expected: usize = c.cpt.parents.iter().map(|p| cards[p.as_str()]).product();
        if c.cpt.rows.len() != expected {
            let row = c.cpt.rows.len().min(expected);
            let range = c.row_ranges.get(row).copied().unwrap_or(c.rows_range);
            let mut err = src.error(
                "BAD_ROW_LENGTH",
                range,
                format!(
                    "table for `{}` has {} rows, expected {expected}",
                    c.cpt.child,
                    c.cpt.rows.len()
                ),
            );
            err.row = Some(row);
            return Err(err);
        }
        let width = cards[c.cpt.child.as_str()];
        for (i, (row, range)) in c.cpt.rows.iter().zip(&c.row_ranges).enumerate() {
            if row.len() != width {
                let mut err = src.error(
                    "BAD_ROW_LENGTH",
                    *range,
                    format!("row {i} of `{}` has {} entries, expected {width}", c.cpt.child, row.len()),
                );
                err.row = Some(i);
                return Err(err);
            }
        }
    }

    let draft = NetworkDraft {
        name: doc.name.clone(),
        variables: doc.variables.iter().map(|v| v.variable.clone()).collect(),
        edges: doc.edges.iter().map(|e| e.edge.clone()).collect(),
        cpts: doc.cpts.iter().map(|c| c.cpt.clone()).collect(),
    };
    let report = validate_network(&draft);
    if let Some(v) = report.violations.first() {
        return Err(locate(src, &doc, v));
    }
    Ok(Network::new(draft).expect("validated above"))
}

fn locate(src: &Source<'_>, doc: &RawDocument, v: &Violation) -> ParseError {
    let var_range = |id: &str| doc.variables.iter().find(|r| r.variable.id == id).map(|r| r.id_range);
    let cpt = |id: &str| doc.cpts.iter().find(|c| c.cpt.child == id);
    let range = if let Some(edge) = &v.edge {
        doc.edges.iter().find(|e| &e.edge == edge).map(|e| e.range)
    } else if let (Some(id), Some(row)) = (&v.variable, v.row) {
        cpt(id).and_then(|c| c.row_ranges.get(row).copied())
    } else if let Some(id) = &v.variable {
        match v.code {
            ViolationCode::CptParentMismatch | ViolationCode::BadRowLength | ViolationCode::DuplicateCpt
            | ViolationCode::OrphanCpt => {
                // the last table for this child is the offending one for duplicates
                doc.cpts.iter().rev().find(|c| &c.cpt.child == id).map(|c| c.range)
            }
            ViolationCode::DuplicateVariable => doc
                .variables
                .iter()
                .rev()
                .find(|r| &r.variable.id == id)
                .map(|r| r.id_range),
            _ => var_range(id),
        }
    } else {
        None
    };
    let mut err = src.error(v.code.as_str(), range.unwrap_or(doc.root), v.message.clone());
    err.row = v.row;
    err
}

/// Parses and validates a model file.
pub fn parse_model(bytes: &[u8]) -> Result<Network, ParseError> {
    parse_model_document(bytes).map(|d| d.network)
}

pub fn parse_model_document(bytes: &[u8]) -> Result<ModelDocument, ParseError> {
    let src = Source::from_bytes(bytes)?;
    let mut doc = read_document(&src, false)?;
    let metadata = std::mem::take(&mut doc.metadata);
    let network = build(&src, doc)?;
    Ok(ModelDocument {
        format_version: FORMAT_VERSION,
        network,
        metadata,
    })
}

/// Parses a model file whose tables may omit `rows` (and may be omitted
/// entirely, in which case parents follow the edge list).
pub fn parse_skeleton(bytes: &[u8]) -> Result<Skeleton, ParseError> {
    let src = Source::from_bytes(bytes)?;
    let mut doc = read_document(&src, true)?;
    let cards: HashMap<String, usize> = doc
        .variables
        .iter()
        .map(|v| (v.variable.id.clone(), v.variable.states.len()))
        .collect();
    for v in &doc.variables {
        if doc.cpts.iter().any(|c| c.cpt.child == v.variable.id) {
            continue;
        }
        let parents: Vec<String> = doc
            .edges
            .iter()
            .filter(|e| e.edge.1 == v.variable.id)
            .map(|e| e.edge.0.clone())
            .collect();
        let ranges = vec![v.id_range; parents.len()];
        doc.cpts.push(RawCpt {
            cpt: Cpt {
                child: v.variable.id.clone(),
                parents,
                rows: Vec::new(),
            },
            range: v.id_range,
            child_range: v.id_range,
            parent_ranges: ranges,
            rows_range: v.id_range,
            row_ranges: Vec::new(),
        });
    }
    for c in &mut doc.cpts {
        let (Some(&width), Some(count)) = (
            cards.get(&c.cpt.child),
            c.cpt.parents.iter().map(|p| cards.get(p).copied()).product::<Option<usize>>(),
        ) else {
            continue; // reported by build
        };
        c.cpt.rows = vec![vec![1.0 / width as f64; width]; count];
        c.row_ranges = vec![c.rows_range; count];
    }
    build(&src, doc).map(|network| Skeleton { network })
}

/// Probability rendered with at most 12 significant digits, shortest form.
pub fn format_probability(p: f64) -> String {
    let rounded: f64 = format!("{p:.11e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

fn quoted(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

fn string_list(items: &[String]) -> String {
    let inner: Vec<String> = items.iter().map(|s| quoted(s)).collect();
    format!("[{}]", inner.join(", "))
}

/// Canonical model file text.
pub fn serialize_model(network: &Network) -> String {
    serialize_model_with_metadata(network, &IndexMap::new())
}

pub fn serialize_model_with_metadata(network: &Network, metadata: &IndexMap<String, serde_json::Value>) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    let _ = writeln!(out, "  \"format_version\": {FORMAT_VERSION},");
    let _ = writeln!(out, "  \"name\": {},", quoted(network.name()));

    out.push_str("  \"variables\": [\n");
    let vars: Vec<String> = network
        .variables()
        .iter()
        .map(|v| {
            format!(
                "    {{\"id\": {}, \"label\": {}, \"states\": {}}}",
                quoted(&v.id),
                quoted(&v.label),
                string_list(&v.states)
            )
        })
        .collect();
    out.push_str(&vars.join(",\n"));
    out.push_str("\n  ],\n");

    let edges = network.edges();
    if edges.is_empty() {
        out.push_str("  \"edges\": [],\n");
    } else {
        out.push_str("  \"edges\": [\n");
        let lines: Vec<String> = edges
            .iter()
            .map(|(p, c)| format!("    [{}, {}]", quoted(p), quoted(c)))
            .collect();
        out.push_str(&lines.join(",\n"));
        out.push_str("\n  ],\n");
    }

    out.push_str("  \"cpts\": [\n");
    let cpts: Vec<String> = network
        .cpts()
        .iter()
        .map(|c| {
            let rows: Vec<String> = c
                .rows
                .iter()
                .map(|r| {
                    let cells: Vec<String> = r.iter().map(|&p| format_probability(p)).collect();
                    format!("        [{}]", cells.join(", "))
                })
                .collect();
            format!(
                "    {{\n      \"child\": {},\n      \"parents\": {},\n      \"rows\": [\n{}\n      ]\n    }}",
                quoted(&c.child),
                string_list(&c.parents),
                rows.join(",\n")
            )
        })
        .collect();
    out.push_str(&cpts.join(",\n"));
    out.push_str("\n  ]");

    if !metadata.is_empty() {
        out.push_str(",\n  \"metadata\": {\n");
        let lines: Vec<String> = metadata
            .iter()
            .map(|(k, v)| format!("    {}: {}", quoted(k), serde_json::to_string(v).expect("json values serialize")))
            .collect();
        out.push_str(&lines.join(",\n"));
        out.push_str("\n  }");
    }
    out.push_str("\n}\n");
    out
}
