//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test -p bncausal-cli --test acceptance`.

use std::path::PathBuf;
use std::time::Instant;

use bncausal::io::{format_probability, parse_model, serialize_model};
use bncausal::models::{fixture, fixture_text, fixtures, FIXTURE_NAMES};
use bncausal::{
    audit_bias, d_separated, enumerate_joint, interventional_query, query_posterior, query_posterior_with_order,
    validate_network, AuditSpec, BnError, Cpt, DiscreteVariable, Evidence, Intervention, Network, NetworkDraft,
};
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn ev(pairs: &[(&str, &str)]) -> Evidence {
    Evidence::from_pairs(pairs.iter().copied()).unwrap()
}

/// P(target=state | evidence) by elimination, cross-checked against enumeration.
fn both(net: &Network, evidence: &[(&str, &str)], target: &str, state: &str) -> Result<f64, String> {
    let e = ev(evidence);
    let a = query_posterior(net, &e, target).map_err(|e| e.to_string())?;
    let b = enumerate_joint(net, &e, target).map_err(|e| e.to_string())?;
    let (a, b) = (a.probability_of(state).unwrap(), b.probability_of(state).unwrap());
    ensure!((a - b).abs() <= 1e-12, "elimination {a} vs enumeration {b}");
    Ok(a)
}

fn p_do(net: &Network, var: &str, state: &str, target: &str) -> f64 {
    interventional_query(net, &Intervention::new(var, state), &Evidence::new(), target)
        .unwrap()
        .probability_of("true")
        .unwrap()
}

fn close(got: f64, want: f64, tol: f64, what: &str) -> Result<(), String> {
    ensure!((got - want).abs() <= tol, "{what}: got {got}, want {want} ± {tol}");
    Ok(())
}

fn tested_selection() -> AuditSpec {
    AuditSpec::new("smoker", "covid19").selection(ev(&[("tested", "true")]))
}

fn simple_smoking() -> Check {
    let start = Instant::now();
    let net = fixture("simple-smoking").unwrap();
    let s = both(&net, &[("tested", "true")], "smoker", "true")?;
    let c1 = both(&net, &[("tested", "true"), ("smoker", "true")], "covid19", "true")?;
    let c0 = both(&net, &[("tested", "true"), ("smoker", "false")], "covid19", "true")?;
    let elapsed = start.elapsed();
    close(s, 297.0 / 1976.0, 1e-9, "P(smoker | tested) exact")?;
    close(c1, 2.0 / 11.0, 1e-9, "P(covid19 | tested, smoker) exact")?;
    close(c0, 5.0 / 23.0, 1e-9, "P(covid19 | tested, ¬smoker) exact")?;
    close(s, 0.1503, 5e-4, "P(smoker | tested)")?;
    close(c1, 0.18182, 5e-4, "P(covid19 | tested, smoker)")?;
    close(c0, 0.21739, 5e-4, "P(covid19 | tested, ¬smoker)")?;
    close(s, 0.15, 1e-3, "rounded 15%")?;
    close(c1, 0.181, 1e-3, "rounded 18.1%")?;
    close(c0, 0.217, 1e-3, "rounded 21.7%")?;
    ensure!(elapsed.as_millis() < 100, "took {elapsed:?}");
    Ok(format!("{s:.4} / {c1:.5} / {c0:.5} in {:.2} ms", elapsed.as_secs_f64() * 1e3))
}

fn simple_reversal() -> Check {
    let net = fixture("simple-smoking-p011").unwrap();
    let r = audit_bias(&net, &tested_selection()).map_err(|e| e.to_string())?;
    ensure!(r.selected_contrast < 0.0, "selected contrast {}", r.selected_contrast);
    close(r.interventional_contrast, 0.01, 1e-12, "interventional contrast")?;
    ensure!(r.reversal, "reversal flag not set");
    Ok(format!("selected {:+.4}, interventional {:+.4}, reversal", r.selected_contrast, r.interventional_contrast))
}

fn realistic() -> Check {
    let net = fixture("realistic-smoking").unwrap();
    let c1 = both(&net, &[("tested", "true"), ("smoker", "true")], "covid19", "true")?;
    let c0 = both(&net, &[("tested", "true"), ("smoker", "false")], "covid19", "true")?;
    close(c1, 0.1548490801928916, 1e-9, "P(covid19 | tested, smoker) exact")?;
    close(c0, 0.1738752953788777, 1e-9, "P(covid19 | tested, ¬smoker) exact")?;
    close(c1, 0.1549, 5e-4, "P(covid19 | tested, smoker)")?;
    close(c0, 0.1739, 5e-4, "P(covid19 | tested, ¬smoker)")?;
    close(c1, 0.15, 5e-3, "rounded 15%")?;
    close(c0, 0.17, 5e-3, "rounded 17%")?;
    Ok(format!("{c1:.4} / {c0:.4}"))
}

fn realistic_reversal() -> Check {
    let net = fixture("realistic-smoking-rr102").unwrap();
    let r = audit_bias(&net, &tested_selection()).map_err(|e| e.to_string())?;
    ensure!(r.selected_contrast < 0.0, "selected contrast {}", r.selected_contrast);
    let (d1, d0) = r.interventional_probabilities;
    close(d1, 0.01122, 1e-9, "P(covid19 | do(smoker))")?;
    close(d0, 0.011, 1e-9, "P(covid19 | do(¬smoker))")?;
    ensure!(d1 > d0, "do contrast not positive");
    ensure!(r.reversal, "reversal flag not set");
    Ok(format!("selected {:+.4}, do {d1:.5} > {d0:.5}, reversal", r.selected_contrast))
}

fn stress_and_contact() -> Check {
    let stress = fixture("stress").unwrap();
    for h in ["true", "false"] {
        let a = both(&stress, &[("healthcare", h), ("stress", "true")], "covid19", "true")?;
        let b = both(&stress, &[("healthcare", h), ("stress", "false")], "covid19", "true")?;
        ensure!(a > b, "stress does not raise covid19 when healthcare={h}");
    }
    let s1 = both(&stress, &[("tested", "true"), ("stress", "true")], "covid19", "true")?;
    let s0 = both(&stress, &[("tested", "true"), ("stress", "false")], "covid19", "true")?;
    ensure!(s1 < s0, "stress tested contrast not negative: {s1} vs {s0}");
    ensure!(p_do(&stress, "stress", "true", "covid19") > p_do(&stress, "stress", "false", "covid19"), "do(stress) contrast not positive");

    let contact = fixture("contact").unwrap();
    let ratio = both(&contact, &[("contact", "true")], "covid19", "true")? / both(&contact, &[("contact", "false")], "covid19", "true")?;
    ensure!((1.8..=2.2).contains(&ratio), "population ratio {ratio}");
    let k1 = both(&contact, &[("tested", "true"), ("contact", "true")], "covid19", "true")?;
    let k0 = both(&contact, &[("tested", "true"), ("contact", "false")], "covid19", "true")?;
    ensure!(k1 < k0, "contact tested contrast not negative: {k1} vs {k0}");
    ensure!(p_do(&contact, "contact", "true", "covid19") > p_do(&contact, "contact", "false", "covid19"), "do(contact) contrast not positive");
    Ok(format!("stress {:.1}% < {:.1}%; contact ratio {ratio:.2}, {:.1}% < {:.1}%", s1 * 100.0, s0 * 100.0, k1 * 100.0, k0 * 100.0))
}

fn small_evidence_sets(net: &Network) -> Vec<Evidence> {
    let vars = net.variables();
    let mut out = vec![Evidence::new()];
    for (i, a) in vars.iter().enumerate() {
        for sa in &a.states {
            let one = ev(&[(a.id.as_str(), sa.as_str())]);
            for b in &vars[i + 1..] {
                for sb in &b.states {
                    out.push(one.with(&b.id, sb).unwrap());
                }
            }
            out.push(one);
        }
    }
    out
}

fn rotations(items: &[String]) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    for k in 0..items.len().max(1) {
        let mut r = items.to_vec();
        r.rotate_left(k);
        out.push(r.iter().rev().cloned().collect());
        out.push(r);
    }
    out
}

fn oracle_equivalence() -> Check {
    let mut queries = 0;
    for net in fixtures() {
        for e in small_evidence_sets(&net) {
            for t in net.variables().iter().filter(|v| !e.contains(&v.id)) {
                match (query_posterior(&net, &e, &t.id), enumerate_joint(&net, &e, &t.id)) {
                    (Ok(a), Ok(b)) => {
                        for (x, y) in a.distribution.iter().zip(&b.distribution) {
                            ensure!((x - y).abs() <= 1e-12, "{} {e} {}: {x} vs {y}", net.name(), t.id);
                        }
                        let hidden: Vec<String> = net
                            .variables()
                            .iter()
                            .map(|v| v.id.clone())
                            .filter(|v| *v != t.id && !e.contains(v))
                            .collect();
                        for order in rotations(&hidden) {
                            let c = query_posterior_with_order(&net, &e, &t.id, &order).map_err(|e| e.to_string())?;
                            for (x, y) in c.distribution.iter().zip(&a.distribution) {
                                ensure!((x - y).abs() <= 1e-12, "{} order {order:?}", net.name());
                            }
                        }
                    }
                    (Err(BnError::ImpossibleEvidence), Err(BnError::ImpossibleEvidence)) => {}
                    (a, b) => return Err(format!("{} {e} {}: {a:?} vs {b:?}", net.name(), t.id)),
                }
                queries += 1;
            }
        }
    }
    Ok(format!("{queries} queries on {} fixtures", FIXTURE_NAMES.len()))
}

fn d_separation() -> Check {
    let simple = fixture("simple-smoking").unwrap();
    let realistic = fixture("realistic-smoking").unwrap();
    let dsep = |n: &Network, g: &[&str]| d_separated(n, "smoker", "covid19", g).unwrap();
    let cases = [
        ("simple, {}", dsep(&simple, &[]), true),
        ("simple, {tested}", dsep(&simple, &["tested"]), false),
        ("realistic, {healthcare}", dsep(&realistic, &["healthcare"]), true),
        ("realistic, {}", dsep(&realistic, &[]), false),
        // tested's parents are healthcare and covid19: with healthcare observed
        // the smoker has no route into the tested collider
        ("realistic, {healthcare, tested}", dsep(&realistic, &["healthcare", "tested"]), true),
    ];
    for (name, got, want) in cases {
        ensure!(got == want, "{name}: got {got}, want {want}");
    }
    let mut islands = NetworkDraft::new("islands");
    for id in ["a", "b", "c"] {
        islands = islands.node(DiscreteVariable::boolean(id, id), Cpt::prior(id, vec![0.5, 0.5]));
    }
    let islands = islands.build().unwrap();
    for g in [&[][..], &["c"][..]] {
        ensure!(d_separated(&islands, "a", "b", g).unwrap(), "disconnected pair not separated given {g:?}");
    }

    let mut independent = 0;
    for net in fixtures() {
        let n = net.len();
        for x in 0..n {
            for y in (0..n).filter(|&y| y != x) {
                let others: Vec<usize> = (0..n).filter(|&v| v != x && v != y).collect();
                for mask in 0..1usize << others.len() {
                    let z: Vec<usize> = others.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v).collect();
                    let zids: Vec<&str> = z.iter().map(|&v| net.variable(v).id.as_str()).collect();
                    let (xid, yid) = (net.variable(x).id.as_str(), net.variable(y).id.as_str());
                    if !d_separated(&net, xid, yid, &zids).unwrap() {
                        continue;
                    }
                    let mut configs = vec![Evidence::new()];
                    for &v in &z {
                        let var = net.variable(v);
                        configs = configs
                            .iter()
                            .flat_map(|c| var.states.iter().map(move |s| c.with(&var.id, s).unwrap()))
                            .collect();
                    }
                    for base in configs {
                        let Ok(marginal) = query_posterior(&net, &base, xid) else { continue };
                        for ys in &net.variable(y).states {
                            if let Ok(cond) = query_posterior(&net, &base.with(yid, ys).unwrap(), xid) {
                                for (a, b) in cond.distribution.iter().zip(&marginal.distribution) {
                                    ensure!((a - b).abs() <= 1e-12, "{}: {xid} vs {yid} given {base}", net.name());
                                }
                                independent += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(format!("{} listed cases, {independent} independence checks", cases.len() + 2))
}

fn random_network(rng: &mut StdRng, index: usize) -> Network {
    let n = rng.random_range(1..=6usize);
    let cards: Vec<usize> = (0..n).map(|_| rng.random_range(2..=4usize)).collect();
    let mut draft = NetworkDraft::new(&format!("random-{index}"));
    for child in 0..n {
        let parents: Vec<usize> = (0..child).filter(|_| rng.random_bool(0.4)).take(3).collect();
        let rows_needed: usize = parents.iter().map(|&p| cards[p]).product();
        let rows = (0..rows_needed)
            .map(|_| {
                let raw: Vec<f64> = (0..cards[child]).map(|_| rng.random_range(1..1000u32) as f64).collect();
                let total: f64 = raw.iter().sum();
                raw.iter().map(|x| format_probability(x / total).parse().unwrap()).collect()
            })
            .collect();
        let id = format!("v{child}");
        let states: Vec<String> = (0..cards[child]).map(|s| format!("s{s}")).collect();
        let parent_ids: Vec<String> = parents.iter().map(|p| format!("v{p}")).collect();
        draft = draft.node(DiscreteVariable::new(&id, &id, states), Cpt::new(&id, parent_ids, rows));
    }
    draft.build().unwrap()
}

fn parser() -> Check {
    for name in FIXTURE_NAMES {
        let text = fixture_text(name).unwrap();
        let net = parse_model(text.as_bytes()).map_err(|e| format!("{name}: {e}"))?;
        ensure!(net == fixture(name).unwrap(), "{name}: parsed fixture differs from builder");
        ensure!(serialize_model(&parse_model(serialize_model(&net).as_bytes()).unwrap()) == serialize_model(&net), "{name}: serialization not stable");
    }
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for i in 0..100 {
        let net = random_network(&mut rng, i);
        let again = parse_model(serialize_model(&net).as_bytes()).map_err(|e| format!("random {i}: {e}"))?;
        ensure!(again == net, "random network {i} did not round-trip");
    }
    let (mut rejected, mut accepted) = (0, 0);
    for i in 0..3000 {
        let mut bytes = fixture_text(FIXTURE_NAMES[i % FIXTURE_NAMES.len()]).unwrap().into_bytes();
        for _ in 0..rng.random_range(1..=4) {
            let at = rng.random_range(0..bytes.len());
            match rng.random_range(0..3) {
                0 => bytes[at] = rng.random(),
                1 => {
                    bytes.remove(at);
                }
                _ => bytes.insert(at, rng.random()),
            }
        }
        match parse_model(&bytes) {
            Ok(net) => {
                ensure!(validate_network(&net.to_draft()).is_ok(), "mutation {i} produced an invalid network");
                accepted += 1;
            }
            Err(e) => {
                ensure!(e.line >= 1 && e.column >= 1, "mutation {i}: unpositioned error");
                rejected += 1;
            }
        }
    }
    Ok(format!("{} fixtures, 100 random networks, 3000 mutations ({rejected} rejected, {accepted} still valid)", FIXTURE_NAMES.len()))
}

fn cli_golden() -> Check {
    let here = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let models = here.join("../../models").display().to_string();
    let mut paths: Vec<PathBuf> = std::fs::read_dir(here.join("tests/golden"))
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "args"))
        .collect();
    paths.sort();
    for path in &paths {
        let args: Vec<String> = std::fs::read_to_string(path)
            .unwrap()
            .lines()
            .map(|l| l.replace("{models}", &models))
            .collect();
        let expected = std::fs::read_to_string(path.with_extension("out")).map_err(|e| e.to_string())?;
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = bncausal_cli::run_cli(std::iter::once("bncausal".to_string()).chain(args), &mut out, &mut err);
        let name = path.file_stem().unwrap().to_string_lossy();
        ensure!(code == 0, "{name}: exit {code}: {}", String::from_utf8_lossy(&err));
        ensure!(out == expected.as_bytes(), "{name}: output differs");
    }
    ensure!(!paths.is_empty(), "no transcripts found");
    Ok(format!("{} transcripts", paths.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("simple smoking model posteriors", simple_smoking),
        ("simple model reversal at 11%", simple_reversal),
        ("realistic smoking model posteriors", realistic),
        ("realistic model reversal at relative risk 1.02", realistic_reversal),
        ("stress and contact sign properties", stress_and_contact),
        ("elimination matches enumeration, order invariant", oracle_equivalence),
        ("d-separation truth table and faithfulness", d_separation),
        ("parser round-trip and fuzzing", parser),
        ("CLI golden transcripts", cli_golden),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match std::panic::catch_unwind(check) {
            Ok(Ok(detail)) => println!("PASS  {name}: {detail}"),
            Ok(Err(why)) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
            Err(_) => {
                failed += 1;
                println!("FAIL  {name}: panicked");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
