//! The `bncausal` command line.
//!
//! Exit status is 0 on success, 1 on domain errors (one JSON line
//! `{"code", "message", "location"?}` on stderr) and 2 on usage errors.

pub mod monitor;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use bncausal::io::{fit_network, parse_model, parse_scenario, parse_skeleton, run_scenario, serialize_model, ParseError, RecordTable};
use bncausal::{
    audit_bias, evidence_probability, interventional_query_many, marginals_given, AuditSpec, BiasAuditReport, BnError, Evidence, Intervention,
    Network,
};
use clap::{Parser, Subcommand, ValueEnum};
use indexmap::IndexMap;
use serde::Serialize;
use serde_json::{json, Value};

use monitor::{percent, RenderedMonitor};

#[derive(Debug, Parser)]
#[command(name = "bncausal", version, about = "Exact inference and selection-bias audits for discrete causal Bayesian networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MonitorFormat {
    Table,
    Bars,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate a model file.
    Validate { model: PathBuf },
    /// Posterior marginals of every variable.
    Marginals {
        model: PathBuf,
        /// Observed value; repeat the flag for several.
        #[arg(long = "evidence", value_name = "VAR=STATE")]
        evidence: Vec<String>,
        #[arg(long, value_enum, default_value = "table")]
        format: MonitorFormat,
    },
    /// Posterior of one variable under evidence and interventions.
    Query {
        model: PathBuf,
        /// Variable to report.
        #[arg(long)]
        target: String,
        /// Also print the probability of this state.
        #[arg(long)]
        state: Option<String>,
        /// Observed value; repeat the flag for several.
        #[arg(long = "evidence", value_name = "VAR=STATE")]
        evidence: Vec<String>,
        /// Intervention applied before conditioning.
        #[arg(long = "do", value_name = "VAR=STATE")]
        interventions: Vec<String>,
        #[arg(long, value_enum, default_value = "table")]
        format: MonitorFormat,
    },
    /// Compare selected, population and interventional contrasts.
    Audit {
        model: PathBuf,
        /// Exposure variable.
        #[arg(long)]
        exposure: String,
        /// Outcome variable.
        #[arg(long)]
        outcome: String,
        /// Outcome state counted as the event; required unless the outcome is Boolean.
        #[arg(long = "outcome-state")]
        outcome_state: Option<String>,
        /// Exposed and unexposed states; required unless the exposure is Boolean.
        #[arg(long = "exposure-states", value_name = "S1,S0")]
        exposure_states: Option<String>,
        /// Selection condition, e.g. tested=true.
        #[arg(long = "selection", value_name = "VAR=STATE")]
        selection: Vec<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: ReportFormat,
    },
    /// Run the queries of a scenario file.
    Scenario {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value = "table")]
        format: MonitorFormat,
    },
    /// Estimate CPTs from CSV records for a model skeleton.
    Fit {
        /// CSV with one column per variable and an optional trailing `count`.
        #[arg(long)]
        data: PathBuf,
        /// Model whose structure and states are kept; its tables are replaced.
        #[arg(long)]
        skeleton: PathBuf,
        /// Pseudo-count added to every cell.
        #[arg(long, default_value_t = 0.0)]
        smoothing: f64,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long = "models-dir", default_value = "models")]
        models_dir: PathBuf,
    },
}

/// A failure that ends the command.
enum Failure {
    Usage(String),
    Domain(Value),
}

impl From<BnError> for Failure {
    fn from(e: BnError) -> Self {
        Failure::Domain(json!({"code": e.code(), "message": e.to_string()}))
    }
}

fn parse_failure(path: &Path, e: ParseError) -> Failure {
    let mut location = json!({"file": path.display().to_string(), "line": e.line, "column": e.column});
    if let Some(t) = e.token {
        location["token"] = json!(t);
    }
    if let Some(r) = e.row {
        location["row"] = json!(r);
    }
    Failure::Domain(json!({"code": e.code, "message": e.message, "location": location}))
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Domain(json!({"code": "IO_ERROR", "message": format!("{}: {e}", path.display())}))
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| io_failure(path, e))
}

fn load_model(path: &Path) -> Result<Network, Failure> {
    parse_model(&read(path)?).map_err(|e| parse_failure(path, e))
}

fn split_assignment(token: &str) -> Result<(String, String), Failure> {
    match token.split_once('=') {
        Some((v, s)) if !v.is_empty() && !s.is_empty() => Ok((v.to_string(), s.to_string())),
        _ => Err(Failure::Usage(format!("expected VAR=STATE, got `{token}`"))),
    }
}

/// Accumulates VAR=STATE flags; naming a variable twice is a usage error.
fn assignments(tokens: &[String], flag: &str) -> Result<Evidence, Failure> {
    let mut out = Evidence::new();
    for t in tokens {
        let (v, s) = split_assignment(t)?;
        if out.contains(&v) {
            return Err(Failure::Usage(format!("`{v}` given twice in --{flag}")));
        }
        out.insert(v, s)?;
    }
    Ok(out)
}

fn to_interventions(ev: &Evidence) -> Vec<Intervention> {
    ev.iter().map(|(v, s)| Intervention::new(v, s)).collect()
}

fn json_line(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("outputs serialize");
    s.push('\n');
    s
}

fn describe(evidence: &Evidence, interventions: &Evidence) -> String {
    let mut parts: Vec<String> = evidence.iter().map(|(v, s)| format!("{v}={s}")).collect();
    parts.extend(interventions.iter().map(|(v, s)| format!("do({v}={s})")));
    parts.join(", ")
}

fn title(target: &str, conditions: &str) -> String {
    if conditions.is_empty() {
        format!("P({target})")
    } else {
        format!("P({target} | {conditions})")
    }
}

fn validate(out: &mut dyn Write, path: &Path) -> Outcome {
    let net = load_model(path)?;
    let _ = writeln!(
        out,
        "ok: {} ({} variables, {} edges)",
        net.name(),
        net.len(),
        net.edges().len()
    );
    Ok(())
}

fn marginals(out: &mut dyn Write, path: &Path, evidence: &[String], format: MonitorFormat) -> Outcome {
    let net = load_model(path)?;
    let ev = assignments(evidence, "evidence")?;
    let m = marginals_given(&net, &ev)?;
    let evidence_probability = evidence_probability(&net, &ev)?;
    match format {
        MonitorFormat::Json => {
            let marginals: IndexMap<&str, IndexMap<&str, f64>> = net
                .variables()
                .iter()
                .map(|v| (v.id.as_str(), v.states.iter().map(String::as_str).zip(m[&v.id].iter().copied()).collect()))
                .collect();
            let body = json!({
                "model": net.name(),
                "evidence": ev,
                "marginals": marginals,
                "evidence_probability": evidence_probability,
            });
            let _ = out.write_all(json_line(&body).as_bytes());
        }
        f => {
            let conditions = describe(&ev, &Evidence::new());
            for (i, v) in net.variables().iter().enumerate() {
                if i > 0 {
                    let _ = writeln!(out);
                }
                let monitor = RenderedMonitor::new(&v.id, &v.states, &m[&v.id]);
                let mut heading = title(&v.id, &conditions);
                if ev.contains(&v.id) {
                    heading.push_str("  [observed]");
                }
                let _ = out.write_all(monitor.render(&heading, f == MonitorFormat::Bars).as_bytes());
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct QueryOutput<'a> {
    model: &'a str,
    target: &'a str,
    evidence: &'a Evidence,
    #[serde(rename = "do")]
    interventions: &'a Evidence,
    distribution: IndexMap<String, f64>,
    evidence_probability: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    state: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    probability: Option<f64>,
}

fn write_query(
    out: &mut dyn Write,
    net: &Network,
    target: &str,
    state: Option<&str>,
    ev: &Evidence,
    dos: &Evidence,
    format: MonitorFormat,
) -> Result<Value, Failure> {
    let result = interventional_query_many(net, &to_interventions(dos), ev, target)?;
    let probability = match state {
        Some(s) => Some(result.probability_of(s).ok_or_else(|| BnError::UnknownState {
            variable: target.to_string(),
            state: s.to_string(),
        })?),
        None => None,
    };
    let output = QueryOutput {
        model: net.name(),
        target,
        evidence: ev,
        interventions: dos,
        distribution: result.to_map(),
        evidence_probability: result.evidence_probability,
        state,
        probability,
    };
    let value = serde_json::to_value(&output).expect("outputs serialize");
    match format {
        MonitorFormat::Json => {}
        f => {
            let monitor = RenderedMonitor::new(target, &result.states, &result.distribution);
            let _ = out.write_all(monitor.render(&title(target, &describe(ev, dos)), f == MonitorFormat::Bars).as_bytes());
            if let (Some(s), Some(p)) = (state, probability) {
                let _ = writeln!(out, "  P({target}={s}) = {}", percent(p));
            }
        }
    }
    Ok(value)
}

fn audit_text(r: &BiasAuditReport) -> String {
    let (e1, e0) = (&r.exposure_states.0, &r.exposure_states.1);
    let sel = describe(&r.selection, &Evidence::new());
    let cond = |e: &str, extra: &str| {
        if extra.is_empty() {
            format!("{}={e}", r.exposure)
        } else {
            format!("{}={e}, {extra}", r.exposure)
        }
    };
    let o = format!("{}={}", r.outcome, r.outcome_state);
    let mut s = String::new();
    s.push_str(&format!("audit: {} -> {}\n", r.exposure, r.outcome));
    if !sel.is_empty() {
        s.push_str(&format!("selection: {sel}\n"));
    }
    let mut row = |label: &str, p: (f64, f64), a: String, b: String, contrast: f64| {
        s.push_str(&format!(
            "{label:<15} P({o} | {a}) = {:.3}%   P({o} | {b}) = {:.3}%   contrast {:+.5}\n",
            p.0 * 100.0,
            p.1 * 100.0,
            contrast
        ));
    };
    row("selected", r.selected_probabilities, cond(e1, &sel), cond(e0, &sel), r.selected_contrast);
    row("population", r.population_probabilities, cond(e1, ""), cond(e0, ""), r.population_contrast);
    row(
        "interventional",
        r.interventional_probabilities,
        format!("do({}={e1})", r.exposure),
        format!("do({}={e0})", r.exposure),
        r.interventional_contrast,
    );
    s.push_str("paths:\n");
    for p in &r.paths_given_selection {
        let roles: Vec<String> = p
            .interior()
            .iter()
            .zip(&p.node_roles)
            .map(|(n, role)| format!("{n}={}", role.as_str()))
            .collect();
        let open_before = r
            .paths_unconditioned
            .iter()
            .find(|q| q.nodes == p.nodes)
            .is_some_and(|q| q.open_given);
        s.push_str(&format!(
            "  {p}  [{}]  unconditioned: {}, given selection: {}\n",
            roles.join(", "),
            if open_before { "open" } else { "blocked" },
            if p.open_given { "open" } else { "blocked" }
        ));
    }
    s.push_str(&format!("reversal: {}\n", if r.reversal { "YES" } else { "NO" }));
    s
}

#[allow(clippy::too_many_arguments)]
fn audit(
    out: &mut dyn Write,
    path: &Path,
    exposure: &str,
    outcome: &str,
    outcome_state: Option<&str>,
    exposure_states: Option<&str>,
    selection: &[String],
    format: ReportFormat,
) -> Outcome {
    let mut spec = AuditSpec::new(exposure, outcome).selection(assignments(selection, "selection")?);
    if let Some(s) = outcome_state {
        spec = spec.outcome_state(s);
    }
    if let Some(pair) = exposure_states {
        match pair.split_once(',') {
            Some((a, b)) if !a.is_empty() && !b.is_empty() => spec = spec.exposure_states(a, b),
            _ => return Err(Failure::Usage(format!("--exposure-states expects S1,S0, got `{pair}`"))),
        }
    }
    let net = load_model(path)?;
    let report = audit_bias(&net, &spec)?;
    let text = match format {
        ReportFormat::Json => json_line(&report),
        ReportFormat::Text => audit_text(&report),
    };
    let _ = out.write_all(text.as_bytes());
    Ok(())
}

fn scenario(out: &mut dyn Write, path: &Path, format: MonitorFormat) -> Outcome {
    let sc = parse_scenario(&read(path)?).map_err(|e| parse_failure(path, e))?;
    let model_path = path.parent().unwrap_or(Path::new(".")).join(&sc.model);
    let net = load_model(&model_path)?;
    let outcomes = run_scenario(&net, &sc)?;
    let mut dos = Evidence::new();
    for i in &sc.interventions {
        dos.insert(i.variable.as_str(), i.state.as_str())?;
    }
    let mut results = Vec::new();
    let mut sink: Vec<u8> = Vec::new();
    if format != MonitorFormat::Json && !sc.label.is_empty() {
        let _ = writeln!(out, "# {}", sc.label);
    }
    for (i, o) in outcomes.iter().enumerate() {
        if format != MonitorFormat::Json && i > 0 {
            let _ = writeln!(out);
        }
        let target: &mut dyn Write = if format == MonitorFormat::Json { &mut sink } else { out };
        results.push(write_query(target, &net, &o.query.target, o.query.state.as_deref(), &sc.evidence, &dos, format)?);
    }
    if format == MonitorFormat::Json {
        let body = json!({"label": sc.label, "model": net.name(), "results": results});
        let _ = out.write_all(json_line(&body).as_bytes());
    }
    Ok(())
}

fn fit(out: &mut dyn Write, data: &Path, skeleton: &Path, smoothing: f64, output: &Path) -> Outcome {
    let sk = parse_skeleton(&read(skeleton)?).map_err(|e| parse_failure(skeleton, e))?;
    let file = std::fs::File::open(data).map_err(|e| io_failure(data, e))?;
    let table = RecordTable::from_csv(file, sk.network.variables())?;
    let net = fit_network(&table, &sk.network, smoothing)?;
    std::fs::write(output, serialize_model(&net)).map_err(|e| io_failure(output, e))?;
    let _ = writeln!(out, "wrote {} ({} records)", output.display(), table.len());
    Ok(())
}

fn serve(port: u16, models_dir: &Path) -> Outcome {
    let runtime = tokio_runtime().map_err(|e| Failure::Domain(json!({"code": "IO_ERROR", "message": e.to_string()})))?;
    runtime
        .block_on(bncausal_server::serve(port, models_dir))
        .map_err(|e| Failure::Domain(json!({"code": "STARTUP", "message": e.to_string()})))
}

fn tokio_runtime() -> std::io::Result<tokio::runtime::Runtime> {
    tokio::runtime::Builder::new_multi_thread().enable_all().build()
}

fn dispatch(command: Command, out: &mut dyn Write) -> Outcome {
    match command {
        Command::Validate { model } => validate(out, &model),
        Command::Marginals { model, evidence, format } => marginals(out, &model, &evidence, format),
        Command::Query {
            model,
            target,
            state,
            evidence,
            interventions,
            format,
        } => {
            let ev = assignments(&evidence, "evidence")?;
            let dos = assignments(&interventions, "do")?;
            let net = load_model(&model)?;
            let value = write_query(out, &net, &target, state.as_deref(), &ev, &dos, format)?;
            if format == MonitorFormat::Json {
                let _ = out.write_all(json_line(&value).as_bytes());
            }
            Ok(())
        }
        Command::Audit {
            model,
            exposure,
            outcome,
            outcome_state,
            exposure_states,
            selection,
            format,
        } => audit(
            out,
            &model,
            &exposure,
            &outcome,
            outcome_state.as_deref(),
            exposure_states.as_deref(),
            &selection,
            format,
        ),
        Command::Scenario { scenario: path, format } => scenario(out, &path, format),
        Command::Fit {
            data,
            skeleton,
            smoothing,
            output,
        } => fit(out, &data, &skeleton, smoothing, &output),
        Command::Serve { port, models_dir } => serve(port, &models_dir),
    }
}

/// Runs one command line (including the program name) and returns the exit status.
pub fn run_cli<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                2
            } else {
                let _ = stdout.write_all(text.as_bytes());
                0
            };
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(()) => 0,
        Err(Failure::Usage(message)) => {
            let _ = writeln!(stderr, "error: {message}");
            2
        }
        Err(Failure::Domain(body)) => {
            let _ = writeln!(stderr, "{}", serde_json::to_string(&body).expect("errors serialize"));
            1
        }
    }
}
