//! Builders for the bundled smoking, stress, contact and dating networks,
//! the fixture documents shipped under `models/`, and the golden table of
//! expected query results.
//!
//! Each smoking builder takes the smoker risk as a parameter so the reversal
//! threshold can be swept. When that parameter leaves covid19 independent of
//! smoking, the smoker→covid19 edge is left out entirely.

use indexmap::IndexMap;
use serde::Serialize;
use serde_json::{json, Value};

use crate::causal::{interventional_query, Intervention};
use crate::error::{BnError, Result};
use crate::inference::query_posterior;
use crate::io::{format_probability, serialize_model_with_metadata, ModelDocument, FORMAT_VERSION};
use crate::network::{Cpt, DiscreteVariable, Evidence, Network, NetworkDraft};

/// Names of the shipped fixtures, in the order they are listed.
pub const FIXTURE_NAMES: [&str; 7] = [
    "simple-smoking",
    "simple-smoking-p011",
    "realistic-smoking",
    "realistic-smoking-rr102",
    "stress",
    "contact",
    "berkson-dating",
];

/// P(tested | healthcare, covid19) shared by the four-node models, rows
/// (h,c), (h,¬c), (¬h,c), (¬h,¬c).
const TESTED_GIVEN_HEALTHCARE_COVID: [f64; 4] = [0.99, 0.10, 0.15, 0.01];
const P_HEALTHCARE: f64 = 0.05;

/// Calibrated constants of a stress-shaped model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExposureConstants {
    pub exposure_given_healthcare: f64,
    pub exposure_given_not_healthcare: f64,
    /// P(covid19 | healthcare, ¬exposure), P(covid19 | ¬healthcare, ¬exposure).
    pub covid_unexposed: (f64, f64),
    /// P(covid19 | healthcare, exposure), P(covid19 | ¬healthcare, exposure).
    pub covid_exposed: (f64, f64),
}

pub const STRESS_CONSTANTS: ExposureConstants = ExposureConstants {
    exposure_given_healthcare: 0.8,
    exposure_given_not_healthcare: 0.2,
    covid_unexposed: (0.001, 0.014),
    covid_exposed: (0.006, 0.016),
};

pub const CONTACT_CONSTANTS: ExposureConstants = ExposureConstants {
    exposure_given_healthcare: 0.85,
    exposure_given_not_healthcare: 0.05,
    covid_unexposed: (0.003, 0.006),
    covid_exposed: (0.005, 0.017),
};

/// Tested-conditioned targets the exposure constants were fitted to:
/// (P(covid19 | tested, exposure), P(covid19 | tested, ¬exposure)).
pub const STRESS_TARGETS: (f64, f64) = (0.106, 0.159);
pub const CONTACT_TARGETS: (f64, f64) = (0.066, 0.079);

/// Rounds to the 12 significant digits model files keep, so builder output
/// and parsed fixtures compare equal.
fn round12(p: f64) -> f64 {
    format_probability(p).parse().expect("formatted probability parses")
}

fn bernoulli(p: f64) -> Vec<f64> {
    vec![round12(p), round12(1.0 - p)]
}

fn check_probability(p: f64, what: &str) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(BnError::InvalidArgument(format!("{what} must lie in [0, 1], got {p}")))
    }
}

fn tested_cpt(parents: [&str; 2], rows: [f64; 4]) -> Cpt {
    Cpt::new("tested", parents, rows.iter().map(|&p| bernoulli(p)).collect())
}

/// smoker → tested ← covid19, with smoker → covid19 when `p_covid_given_smoker`
/// differs from the 10% baseline.
pub fn build_simple_smoking(p_covid_given_smoker: f64) -> Result<Network> {
    check_probability(p_covid_given_smoker, "P(covid19 | smoker)")?;
    let covid = if p_covid_given_smoker == 0.10 {
        Cpt::prior("covid19", bernoulli(0.10))
    } else {
        Cpt::new("covid19", ["smoker"], vec![bernoulli(p_covid_given_smoker), bernoulli(0.10)])
    };
    NetworkDraft::new("simple-smoking")
        .node(DiscreteVariable::boolean("smoker", "Smoker"), Cpt::prior("smoker", bernoulli(0.27)))
        .node(DiscreteVariable::boolean("covid19", "COVID-19"), covid)
        .node(
            DiscreteVariable::boolean("tested", "Tested"),
            tested_cpt(["smoker", "covid19"], [0.10, 0.05, 0.25, 0.10]),
        )
        .build()
}

/// Adds the healthcare-worker confounder. Smokers' covid19 risk is the
/// stratum baseline (3% / 1%) times `relative_risk`.
pub fn build_realistic_smoking(relative_risk: f64) -> Result<Network> {
    if !relative_risk.is_finite() || relative_risk < 0.0 {
        return Err(BnError::InvalidArgument(format!(
            "relative risk must be a finite non-negative number, got {relative_risk}"
        )));
    }
    let (base_h, base_n) = (0.03, 0.01);
    let covid = if relative_risk == 1.0 {
        Cpt::new("covid19", ["healthcare"], vec![bernoulli(base_h), bernoulli(base_n)])
    } else {
        let (risk_h, risk_n) = (round12(base_h * relative_risk), round12(base_n * relative_risk));
        check_probability(risk_h, "P(covid19 | healthcare, smoker)")?;
        check_probability(risk_n, "P(covid19 | ¬healthcare, smoker)")?;
        Cpt::new(
            "covid19",
            ["healthcare", "smoker"],
            vec![bernoulli(risk_h), bernoulli(base_h), bernoulli(risk_n), bernoulli(base_n)],
        )
    };
    NetworkDraft::new("realistic-smoking")
        .node(
            DiscreteVariable::boolean("healthcare", "Healthcare worker"),
            Cpt::prior("healthcare", bernoulli(P_HEALTHCARE)),
        )
        .node(
            DiscreteVariable::boolean("smoker", "Smoker"),
            Cpt::new("smoker", ["healthcare"], vec![bernoulli(0.14), bernoulli(0.28)]),
        )
        .node(DiscreteVariable::boolean("covid19", "COVID-19"), covid)
        .node(
            DiscreteVariable::boolean("tested", "Tested"),
            tested_cpt(["healthcare", "covid19"], TESTED_GIVEN_HEALTHCARE_COVID),
        )
        .build()
}

/// healthcare → exposure, {healthcare, exposure} → covid19,
/// {healthcare, covid19} → tested.
pub fn build_exposure_model(name: &str, exposure: DiscreteVariable, c: &ExposureConstants) -> Result<Network> {
    let e = exposure.id.clone();
    NetworkDraft::new(name)
        .node(
            DiscreteVariable::boolean("healthcare", "Healthcare worker"),
            Cpt::prior("healthcare", bernoulli(P_HEALTHCARE)),
        )
        .node(
            exposure,
            Cpt::new(
                &e,
                ["healthcare"],
                vec![bernoulli(c.exposure_given_healthcare), bernoulli(c.exposure_given_not_healthcare)],
            ),
        )
        .node(
            DiscreteVariable::boolean("covid19", "COVID-19"),
            Cpt::new(
                "covid19",
                ["healthcare", e.as_str()],
                vec![
                    bernoulli(c.covid_exposed.0),
                    bernoulli(c.covid_unexposed.0),
                    bernoulli(c.covid_exposed.1),
                    bernoulli(c.covid_unexposed.1),
                ],
            ),
        )
        .node(
            DiscreteVariable::boolean("tested", "Tested"),
            tested_cpt(["healthcare", "covid19"], TESTED_GIVEN_HEALTHCARE_COVID),
        )
        .build()
}

pub fn build_stress_model() -> Result<Network> {
    build_exposure_model("stress", DiscreteVariable::boolean("stress", "Stress"), &STRESS_CONSTANTS)
}

pub fn build_contact_model() -> Result<Network> {
    build_exposure_model(
        "contact",
        DiscreteVariable::boolean("contact", "Contact with COVID-19 patients"),
        &CONTACT_CONSTANTS,
    )
}

/// looks → date ← personality with independent, even priors.
pub fn build_berkson_dating() -> Result<Network> {
    NetworkDraft::new("berkson-dating")
        .node(
            DiscreteVariable::new("looks", "Looks", ["attractive", "unattractive"]),
            Cpt::prior("looks", vec![0.5, 0.5]),
        )
        .node(
            DiscreteVariable::new("personality", "Personality", ["nice", "mean"]),
            Cpt::prior("personality", vec![0.5, 0.5]),
        )
        .node(
            DiscreteVariable::boolean("date", "Would date"),
            Cpt::new(
                "date",
                ["looks", "personality"],
                vec![bernoulli(0.9), bernoulli(0.5), bernoulli(0.5), bernoulli(0.1)],
            ),
        )
        .build()
}

/// The network shipped as `models/<name>.json`.
pub fn fixture(name: &str) -> Result<Network> {
    let net = match name {
        "simple-smoking" => build_simple_smoking(0.10)?,
        "simple-smoking-p011" => build_simple_smoking(0.11)?,
        "realistic-smoking" => build_realistic_smoking(1.0)?,
        "realistic-smoking-rr102" => build_realistic_smoking(1.02)?,
        "stress" => build_stress_model()?,
        "contact" => build_contact_model()?,
        "berkson-dating" => build_berkson_dating()?,
        other => return Err(BnError::InvalidArgument(format!("no fixture named `{other}`"))),
    };
    Ok(net.with_name(name))
}

pub fn fixtures() -> Vec<Network> {
    FIXTURE_NAMES
        .iter()
        .map(|n| fixture(n).expect("fixtures build"))
        .collect()
}

fn p_true(net: &Network, evidence: &[(&str, &str)], target: &str) -> Result<f64> {
    let ev = Evidence::from_pairs(evidence.iter().copied())?;
    Ok(query_posterior(net, &ev, target)?.probability_of("true").expect("Boolean target"))
}

fn p_do(net: &Network, variable: &str, state: &str, target: &str) -> Result<f64> {
    let r = interventional_query(net, &Intervention::new(variable, state), &Evidence::new(), target)?;
    Ok(r.probability_of("true").expect("Boolean target"))
}

fn rounded(p: f64) -> Value {
    json!(round12(p))
}

/// Endpoints an exposure model achieves, recorded next to its constants.
fn calibration_metadata(net: &Network, exposure: &str, c: &ExposureConstants, targets: (f64, f64)) -> Result<Value> {
    let tested_exposed = p_true(net, &[("tested", "true"), (exposure, "true")], "covid19")?;
    let tested_unexposed = p_true(net, &[("tested", "true"), (exposure, "false")], "covid19")?;
    let exposed = p_true(net, &[(exposure, "true")], "covid19")?;
    let unexposed = p_true(net, &[(exposure, "false")], "covid19")?;
    Ok(json!({
        "method": "exhaustive grid search: exposure priors on a 0.05 grid, unexposed covid19 rates on 0.001..0.020, exposed rates on 0.001..0.060, minimizing squared distance to the targets",
        "constants": c,
        "targets": {"tested_exposed": targets.0, "tested_unexposed": targets.1},
        "achieved": {
            "tested_exposed": rounded(tested_exposed),
            "tested_unexposed": rounded(tested_unexposed),
            "population_exposed": rounded(exposed),
            "population_unexposed": rounded(unexposed),
            "population_ratio": rounded(exposed / unexposed),
            "do_exposed": rounded(p_do(net, exposure, "true", "covid19")?),
            "do_unexposed": rounded(p_do(net, exposure, "false", "covid19")?),
        }
    }))
}

/// The fixture together with the metadata written to its file.
pub fn fixture_document(name: &str) -> Result<ModelDocument> {
    let network = fixture(name)?;
    let description = match name {
        "simple-smoking" => "Smoking and covid19 both raise the chance of being tested; smoking has no effect on covid19.",
        "simple-smoking-p011" => "As simple-smoking, but smokers' covid19 risk rises from 10% to 11%.",
        "realistic-smoking" => "Healthcare workers smoke less, catch covid19 more and are tested more; smoking has no effect on covid19.",
        "realistic-smoking-rr102" => "As realistic-smoking, with a 2% relative increase in covid19 risk for smokers.",
        "stress" => "Healthcare workers are more stressed; stress slightly raises covid19 risk. Calibrated constants.",
        "contact" => "Healthcare workers have more contact with covid19 patients, which roughly doubles covid19 risk. Calibrated constants.",
        _ => "Looks and personality are independent; both make a date more likely.",
    };
    let mut metadata = IndexMap::new();
    metadata.insert("description".to_string(), json!(description));
    match name {
        "stress" => {
            metadata.insert(
                "calibration".to_string(),
                calibration_metadata(&network, "stress", &STRESS_CONSTANTS, STRESS_TARGETS)?,
            );
        }
        "contact" => {
            metadata.insert(
                "calibration".to_string(),
                calibration_metadata(&network, "contact", &CONTACT_CONSTANTS, CONTACT_TARGETS)?,
            );
        }
        _ => {}
    }
    Ok(ModelDocument {
        format_version: FORMAT_VERSION,
        network,
        metadata,
    })
}

/// Exact bytes of `models/<name>.json`.
pub fn fixture_text(name: &str) -> Result<String> {
    let doc = fixture_document(name)?;
    Ok(serialize_model_with_metadata(&doc.network, &doc.metadata))
}

/// One pinned query result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoldenExpectation {
    pub fixture: String,
    pub evidence: Evidence,
    pub interventions: Vec<Intervention>,
    pub target: String,
    pub state: String,
    pub expected: f64,
    pub tolerance: f64,
    pub provenance: String,
}

struct Golden {
    fixture: &'static str,
    evidence: &'static [(&'static str, &'static str)],
    intervention: Option<(&'static str, &'static str)>,
    target: &'static str,
    state: &'static str,
    expected: f64,
    tolerance: f64,
    provenance: &'static str,
}

const EXACT: f64 = 1e-9;
const T: &str = "true";
const F: &str = "false";

#[rustfmt::skip]
const GOLDEN: &[Golden] = &[
    Golden { fixture: "simple-smoking", evidence: &[], intervention: None, target: "tested", state: T, expected: 0.0988, tolerance: EXACT, provenance: "exact: 0.27*0.055 + 0.73*0.115" },
    Golden { fixture: "simple-smoking", evidence: &[("tested", T)], intervention: None, target: "smoker", state: T, expected: 297.0 / 1976.0, tolerance: EXACT, provenance: "exact: 0.01485 / 0.0988" },
    Golden { fixture: "simple-smoking", evidence: &[("tested", T)], intervention: None, target: "smoker", state: T, expected: 0.1503, tolerance: 5e-4, provenance: "rounded reading 0.1503" },
    Golden { fixture: "simple-smoking", evidence: &[("tested", T)], intervention: None, target: "smoker", state: T, expected: 0.15, tolerance: 1e-3, provenance: "published monitor reading 15%" },
    Golden { fixture: "simple-smoking", evidence: &[("tested", T), ("smoker", T)], intervention: None, target: "covid19", state: T, expected: 2.0 / 11.0, tolerance: EXACT, provenance: "exact: 0.0027 / 0.01485" },
    Golden { fixture: "simple-smoking", evidence: &[("tested", T), ("smoker", T)], intervention: None, target: "covid19", state: T, expected: 0.18182, tolerance: 5e-4, provenance: "rounded reading 0.18182" },
    Golden { fixture: "simple-smoking", evidence: &[("tested", T), ("smoker", T)], intervention: None, target: "covid19", state: T, expected: 0.181, tolerance: 1e-3, provenance: "published monitor reading 18.1%" },
    Golden { fixture: "simple-smoking", evidence: &[("tested", T), ("smoker", F)], intervention: None, target: "covid19", state: T, expected: 5.0 / 23.0, tolerance: EXACT, provenance: "exact: 0.01825 / 0.08395" },
    Golden { fixture: "simple-smoking", evidence: &[("tested", T), ("smoker", F)], intervention: None, target: "covid19", state: T, expected: 0.21739, tolerance: 5e-4, provenance: "rounded reading 0.21739" },
    Golden { fixture: "simple-smoking", evidence: &[("tested", T), ("smoker", F)], intervention: None, target: "covid19", state: T, expected: 0.217, tolerance: 1e-3, provenance: "published monitor reading 21.7%" },
    Golden { fixture: "simple-smoking-p011", evidence: &[("tested", T), ("smoker", T)], intervention: None, target: "covid19", state: T, expected: 22.0 / 111.0, tolerance: EXACT, provenance: "exact: 0.00297 / 0.014985" },
    Golden { fixture: "simple-smoking-p011", evidence: &[("tested", T), ("smoker", F)], intervention: None, target: "covid19", state: T, expected: 5.0 / 23.0, tolerance: EXACT, provenance: "exact: non-smoker stratum unchanged" },
    Golden { fixture: "simple-smoking-p011", evidence: &[], intervention: Some(("smoker", T)), target: "covid19", state: T, expected: 0.11, tolerance: EXACT, provenance: "exact: covid19 row for smokers" },
    Golden { fixture: "simple-smoking-p011", evidence: &[], intervention: Some(("smoker", F)), target: "covid19", state: T, expected: 0.10, tolerance: EXACT, provenance: "exact: covid19 row for non-smokers" },
    Golden { fixture: "realistic-smoking", evidence: &[], intervention: None, target: "smoker", state: T, expected: 0.273, tolerance: EXACT, provenance: "exact: 0.05*0.14 + 0.95*0.28" },
    Golden { fixture: "realistic-smoking", evidence: &[], intervention: None, target: "tested", state: T, expected: 0.017165, tolerance: EXACT, provenance: "exact: enumeration over 16 joint states" },
    Golden { fixture: "realistic-smoking", evidence: &[("tested", T), ("smoker", T)], intervention: None, target: "covid19", state: T, expected: 0.1548490801928916, tolerance: EXACT, provenance: "exact: enumeration over 16 joint states" },
    Golden { fixture: "realistic-smoking", evidence: &[("tested", T), ("smoker", T)], intervention: None, target: "covid19", state: T, expected: 0.15, tolerance: 5e-3, provenance: "published monitor reading 15%" },
    Golden { fixture: "realistic-smoking", evidence: &[("tested", T), ("smoker", F)], intervention: None, target: "covid19", state: T, expected: 0.1738752953788777, tolerance: EXACT, provenance: "exact: enumeration over 16 joint states" },
    Golden { fixture: "realistic-smoking", evidence: &[("tested", T), ("smoker", F)], intervention: None, target: "covid19", state: T, expected: 0.1739, tolerance: 5e-3, provenance: "rounded reading 0.1739" },
    Golden { fixture: "realistic-smoking", evidence: &[("tested", T), ("smoker", F)], intervention: None, target: "covid19", state: T, expected: 0.17, tolerance: 5e-3, provenance: "published monitor reading 17%" },
    Golden { fixture: "realistic-smoking-rr102", evidence: &[("tested", T), ("smoker", T)], intervention: None, target: "covid19", state: T, expected: 0.15749655386127823, tolerance: EXACT, provenance: "exact: enumeration over 16 joint states" },
    Golden { fixture: "realistic-smoking-rr102", evidence: &[("tested", T), ("smoker", F)], intervention: None, target: "covid19", state: T, expected: 0.1738752953788777, tolerance: EXACT, provenance: "exact: non-smoker stratum unchanged" },
    Golden { fixture: "realistic-smoking-rr102", evidence: &[], intervention: Some(("smoker", T)), target: "covid19", state: T, expected: 0.01122, tolerance: EXACT, provenance: "exact: back-door sum 0.05*0.0306 + 0.95*0.0102" },
    Golden { fixture: "realistic-smoking-rr102", evidence: &[], intervention: Some(("smoker", F)), target: "covid19", state: T, expected: 0.011, tolerance: EXACT, provenance: "exact: back-door sum 0.05*0.03 + 0.95*0.01" },
    Golden { fixture: "stress", evidence: &[("tested", T), ("stress", T)], intervention: None, target: "covid19", state: T, expected: 0.106, tolerance: 1e-3, provenance: "calibration target 10.6%" },
    Golden { fixture: "stress", evidence: &[("tested", T), ("stress", F)], intervention: None, target: "covid19", state: T, expected: 0.159, tolerance: 1e-3, provenance: "calibration target 15.9%" },
    Golden { fixture: "contact", evidence: &[("tested", T), ("contact", T)], intervention: None, target: "covid19", state: T, expected: 0.066, tolerance: 1e-3, provenance: "calibration target 6.6%" },
    Golden { fixture: "contact", evidence: &[("tested", T), ("contact", F)], intervention: None, target: "covid19", state: T, expected: 0.079, tolerance: 1e-3, provenance: "calibration target 7.9%" },
    Golden { fixture: "berkson-dating", evidence: &[("date", T), ("looks", "attractive")], intervention: None, target: "personality", state: "nice", expected: 9.0 / 14.0, tolerance: EXACT, provenance: "exact: 0.45 / 0.7" },
    Golden { fixture: "berkson-dating", evidence: &[("date", T), ("looks", "unattractive")], intervention: None, target: "personality", state: "nice", expected: 5.0 / 6.0, tolerance: EXACT, provenance: "exact: 0.25 / 0.3" },
];

/// Every pinned expectation, exact values first within each query.
pub fn golden_table() -> Vec<GoldenExpectation> {
    GOLDEN
        .iter()
        .map(|g| GoldenExpectation {
            fixture: g.fixture.to_string(),
            evidence: Evidence::from_pairs(g.evidence.iter().copied()).expect("distinct evidence variables"),
            interventions: g.intervention.iter().map(|&(v, s)| Intervention::new(v, s)).collect(),
            target: g.target.to_string(),
            state: g.state.to_string(),
            expected: g.expected,
            tolerance: g.tolerance,
            provenance: g.provenance.to_string(),
        })
        .collect()
}
