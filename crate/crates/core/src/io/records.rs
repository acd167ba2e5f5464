use std::io::Read;

use crate::error::{BnError, Result};
use crate::network::{Cpt, DiscreteVariable, Network, NetworkDraft};

/// Tabular observations with every cell resolved to a state index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordTable {
    columns: Vec<String>,
    cards: Vec<usize>,
    rows: Vec<Vec<usize>>,
    counts: Vec<u64>,
}

impl RecordTable {
    /// Builds a table from already-resolved rows. Each row carries a weight.
    pub fn new(variables: &[&DiscreteVariable], rows: Vec<Vec<usize>>, counts: Vec<u64>) -> Result<Self> {
        if rows.len() != counts.len() {
            return Err(BnError::InvalidArgument("one count per row is required".into()));
        }
        let cards: Vec<usize> = variables.iter().map(|v| v.cardinality()).collect();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cards.len() || row.iter().zip(&cards).any(|(s, c)| s >= c) {
                return Err(BnError::BadRecord {
                    line: i as u64 + 1,
                    message: "row does not match the columns".into(),
                });
            }
        }
        Ok(RecordTable {
            columns: variables.iter().map(|v| v.id.clone()).collect(),
            cards,
            rows,
            counts,
        })
    }

    /// Reads RFC 4180 CSV whose header names variables of `variables`, with an
    /// optional trailing integer column `count`.
    pub fn from_csv<R: Read>(reader: R, variables: &[DiscreteVariable]) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let bad = |line: u64, message: String| BnError::BadRecord { line, message };
        let header = csv.headers().map_err(|e| bad(1, e.to_string()))?.clone();
        let mut names: Vec<&str> = header.iter().collect();
        let has_count = names.last() == Some(&"count");
        if has_count {
            names.pop();
        }
        let mut columns: Vec<&DiscreteVariable> = Vec::with_capacity(names.len());
        for name in &names {
            let var = variables
                .iter()
                .find(|v| v.id == *name)
                .ok_or_else(|| BnError::UnknownVariable(name.to_string()))?;
            if columns.iter().any(|c| c.id == var.id) {
                return Err(bad(1, format!("column `{name}` repeated")));
            }
            columns.push(var);
        }

        let mut rows = Vec::new();
        let mut counts = Vec::new();
        for record in csv.records() {
            let record = record.map_err(|e| bad(e.position().map_or(0, |p| p.line()), e.to_string()))?;
            let line = record.position().map_or(0, |p| p.line());
            let mut row = Vec::with_capacity(columns.len());
            for (cell, var) in record.iter().zip(&columns) {
                let state = var
                    .state_index(cell)
                    .ok_or_else(|| bad(line, format!("`{cell}` is not a state of `{}`", var.id)))?;
                row.push(state);
            }
            let count = if has_count {
                let cell = record.get(columns.len()).unwrap_or("");
                cell.trim()
                    .parse::<u64>()
                    .map_err(|_| bad(line, format!("count `{cell}` is not a non-negative integer")))?
            } else {
                1
            };
            rows.push(row);
            counts.push(count);
        }
        RecordTable::new(&columns, rows, counts)
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn column(&self, id: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == id)
            .ok_or_else(|| BnError::MissingColumn(id.to_string()))
    }
}

/// Smoothed frequency estimate of `child` given `parents`:
/// each row is `(count + smoothing) / (total + smoothing * child states)`.
pub fn cpt_from_counts(records: &RecordTable, child: &str, parents: &[&str], smoothing: f64) -> Result<Cpt> {
    if !smoothing.is_finite() || smoothing < 0.0 {
        return Err(BnError::InvalidArgument(format!("smoothing must be a finite non-negative number, got {smoothing}")));
    }
    let ci = records.column(child)?;
    let pis: Vec<usize> = parents.iter().map(|p| records.column(p)).collect::<Result<_>>()?;
    let parent_cards: Vec<usize> = pis.iter().map(|&i| records.cards[i]).collect();
    let width = records.cards[ci];
    let row_count: usize = parent_cards.iter().product();

    let mut tallies = vec![vec![0u64; width]; row_count];
    for (row, &count) in records.rows.iter().zip(&records.counts) {
        let r = pis.iter().fold(0, |acc, &i| acc * records.cards[i] + row[i]);
        tallies[r][row[ci]] += count;
    }

    let mut rows = Vec::with_capacity(row_count);
    for (r, tally) in tallies.iter().enumerate() {
        let total: u64 = tally.iter().sum();
        if total == 0 && smoothing == 0.0 {
            return Err(BnError::EmptyConfiguration {
                child: child.to_string(),
                row: r,
            });
        }
        let denom = total as f64 + smoothing * width as f64;
        rows.push(tally.iter().map(|&c| (c as f64 + smoothing) / denom).collect());
    }
    Ok(Cpt::new(child, parents.iter().copied(), rows))
}

/// Fits every table of `skeleton` from the records.
pub fn fit_network(records: &RecordTable, skeleton: &Network, smoothing: f64) -> Result<Network> {
    let mut draft: NetworkDraft = skeleton.to_draft();
    for cpt in &mut draft.cpts {
        let parents: Vec<&str> = cpt.parents.iter().map(String::as_str).collect();
        *cpt = cpt_from_counts(records, &cpt.child, &parents, smoothing)?;
    }
    Network::new(draft)
}
