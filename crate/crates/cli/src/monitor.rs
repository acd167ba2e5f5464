//! Text probability monitors: one line per state with a percentage and an
//! optional bar of `#` characters.

use serde::Serialize;

pub const BAR_WIDTH: usize = 20;

// Products like 0.0005 * 1000 can land a hair below the half; nudge them up.
const HALF_UP_SLACK: f64 = 1e-9;

fn half_up(x: f64) -> u64 {
    (x + 0.5 + HALF_UP_SLACK).floor().max(0.0) as u64
}

/// Percentage with one decimal, rounded half-up: 0.18182 → "18.2%".
pub fn percent(p: f64) -> String {
    let tenths = half_up(p * 1000.0);
    format!("{}.{}%", tenths / 10, tenths % 10)
}

/// `#` repeated in proportion to `p`, 20 characters at 1.0.
pub fn bar(p: f64) -> String {
    "#".repeat((half_up(p * BAR_WIDTH as f64) as usize).min(BAR_WIDTH))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonitorLine {
    pub state: String,
    pub probability: f64,
    pub bar: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RenderedMonitor {
    pub variable: String,
    pub states: Vec<MonitorLine>,
}

impl RenderedMonitor {
    pub fn new(variable: &str, states: &[String], distribution: &[f64]) -> Self {
        RenderedMonitor {
            variable: variable.to_string(),
            states: states
                .iter()
                .zip(distribution)
                .map(|(s, &p)| MonitorLine {
                    state: s.clone(),
                    probability: p,
                    bar: bar(p),
                })
                .collect(),
        }
    }

    /// `title` on the first line, then one indented line per state.
    pub fn render(&self, title: &str, with_bars: bool) -> String {
        let width = self.states.iter().map(|l| l.state.chars().count()).max().unwrap_or(0);
        let mut out = format!("{title}\n");
        for line in &self.states {
            if with_bars {
                out.push_str(&format!(
                    "  {:<width$}  {:<bw$}  {:>6}\n",
                    line.state,
                    line.bar,
                    percent(line.probability),
                    bw = BAR_WIDTH
                ));
            } else {
                out.push_str(&format!("  {:<width$}  {:>6}\n", line.state, percent(line.probability)));
            }
        }
        out
    }
}
