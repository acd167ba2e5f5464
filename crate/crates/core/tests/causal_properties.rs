use bncausal::models::{self, fixtures};
use bncausal::{
    apply_do, audit_bias, classify_paths, d_separated, interventional_query, prior_marginals, query_posterior,
    AuditSpec, BnError, Evidence, Intervention, Network, NodeRole,
};

fn p(net: &Network, ev: &[(&str, &str)], target: &str, state: &str) -> f64 {
    let ev = Evidence::from_pairs(ev.iter().copied()).unwrap();
    query_posterior(net, &ev, target).unwrap().probability_of(state).unwrap()
}

fn p_do(net: &Network, var: &str, state: &str, target: &str) -> f64 {
    interventional_query(net, &Intervention::new(var, state), &Evidence::new(), target)
        .unwrap()
        .probability_of("true")
        .unwrap()
}

#[test]
fn d_separation_truth_table() {
    let simple = models::fixture("simple-smoking").unwrap();
    let realistic = models::fixture("realistic-smoking").unwrap();
    let dating = models::fixture("berkson-dating").unwrap();
    assert!(d_separated(&simple, "smoker", "covid19", &[]).unwrap());
    assert!(!d_separated(&simple, "smoker", "covid19", &["tested"]).unwrap());
    assert!(d_separated(&realistic, "smoker", "covid19", &["healthcare"]).unwrap());
    assert!(!d_separated(&realistic, "smoker", "covid19", &[]).unwrap());
    // tested depends on healthcare and covid19 only, so with healthcare observed
    // the smoker never reaches the tested collider
    assert!(d_separated(&realistic, "smoker", "covid19", &["healthcare", "tested"]).unwrap());
    for h in ["true", "false"] {
        let a = p(&realistic, &[("healthcare", h), ("tested", "true"), ("smoker", "true")], "covid19", "true");
        let b = p(&realistic, &[("healthcare", h), ("tested", "true"), ("smoker", "false")], "covid19", "true");
        assert!((a - b).abs() < 1e-15);
    }
    assert!(!d_separated(&realistic, "smoker", "covid19", &["tested"]).unwrap());
    assert!(d_separated(&dating, "looks", "personality", &[]).unwrap());
    assert!(!d_separated(&dating, "looks", "personality", &["date"]).unwrap());
}

fn subsets(items: &[usize]) -> Vec<Vec<usize>> {
    (0..1usize << items.len())
        .map(|m| items.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, &v)| v).collect())
        .collect()
}

fn assignments(net: &Network, vars: &[usize]) -> Vec<Vec<(String, String)>> {
    let mut out = vec![Vec::new()];
    for &v in vars {
        let var = net.variable(v);
        out = out
            .into_iter()
            .flat_map(|prefix| {
                var.states.iter().map(move |s| {
                    let mut next = prefix.clone();
                    next.push((var.id.clone(), s.clone()));
                    next
                })
            })
            .collect();
    }
    out
}

#[test]
fn d_separated_pairs_are_numerically_independent() {
    let mut checked = 0;
    for net in fixtures() {
        let n = net.len();
        for x in 0..n {
            for y in 0..n {
                if x == y {
                    continue;
                }
                let others: Vec<usize> = (0..n).filter(|&v| v != x && v != y).collect();
                for z in subsets(&others) {
                    let ids: Vec<&str> = z.iter().map(|&v| net.variable(v).id.as_str()).collect();
                    let (xid, yid) = (&net.variable(x).id, &net.variable(y).id);
                    if !d_separated(&net, xid, yid, &ids).unwrap() {
                        continue;
                    }
                    for zs in assignments(&net, &z) {
                        let base = Evidence::from_pairs(zs.iter().map(|(a, b)| (a.as_str(), b.as_str()))).unwrap();
                        let Ok(marginal) = query_posterior(&net, &base, xid) else { continue };
                        for ys in &net.variable(y).states {
                            match query_posterior(&net, &base.with(yid, ys).unwrap(), xid) {
                                Ok(cond) => {
                                    for (a, b) in cond.distribution.iter().zip(&marginal.distribution) {
                                        assert!((a - b).abs() <= 1e-12, "{} {xid} _||_ {yid} | {base}", net.name());
                                    }
                                    checked += 1;
                                }
                                Err(BnError::ImpossibleEvidence) => {}
                                Err(e) => panic!("{e}"),
                            }
                        }
                    }
                }
            }
        }
    }
    assert!(checked > 100, "{checked}");
}

#[test]
fn intervening_on_a_root_equals_observing_it() {
    for net in fixtures() {
        for root in (0..net.len()).filter(|&i| net.parents(i).is_empty()) {
            let rid = net.variable(root).id.clone();
            for state in net.variable(root).states.clone() {
                for target in net.variables().iter().filter(|v| v.id != rid) {
                    let a = interventional_query(&net, &Intervention::new(&rid, &state), &Evidence::new(), &target.id)
                        .unwrap();
                    let b = query_posterior(&net, &Evidence::from_pairs([(rid.as_str(), state.as_str())]).unwrap(), &target.id)
                        .unwrap();
                    for (x, y) in a.distribution.iter().zip(&b.distribution) {
                        assert!((x - y).abs() <= 1e-12);
                    }
                }
            }
        }
    }
}

#[test]
fn surgery_is_local() {
    for net in fixtures() {
        let before = prior_marginals(&net).unwrap();
        for i in 0..net.len() {
            let var = net.variable(i).clone();
            let cut = apply_do(&net, &Intervention::new(&var.id, &var.states[0])).unwrap();
            let ci = cut.index_of(&var.id).unwrap();
            assert!(cut.parents(ci).is_empty());
            assert_eq!(cut.cpt(ci).rows[0][0], 1.0);
            for j in (0..net.len()).filter(|&j| j != i) {
                assert_eq!(cut.cpt_for(&net.variable(j).id), Some(net.cpt(j)));
            }
            let after = prior_marginals(&cut).unwrap();
            let desc = net.descendants(i);
            for j in (0..net.len()).filter(|&j| j != i && !desc[j]) {
                let id = &net.variable(j).id;
                for (a, b) in after[id].iter().zip(&before[id]) {
                    assert!((a - b).abs() <= 1e-12, "{}: do({}) moved {id}", net.name(), var.id);
                }
            }
        }
    }
}

#[test]
fn stress_model_reverses_under_testing() {
    let net = models::build_stress_model().unwrap();
    for h in ["true", "false"] {
        assert!(p(&net, &[("healthcare", h), ("stress", "true")], "covid19", "true") > p(&net, &[("healthcare", h), ("stress", "false")], "covid19", "true"));
    }
    assert!(p(&net, &[("healthcare", "true")], "stress", "true") > p(&net, &[("healthcare", "false")], "stress", "true"));
    let tested_s = p(&net, &[("tested", "true"), ("stress", "true")], "covid19", "true");
    let tested_ns = p(&net, &[("tested", "true"), ("stress", "false")], "covid19", "true");
    assert!(tested_s < tested_ns);
    assert!(p_do(&net, "stress", "true", "covid19") > p_do(&net, "stress", "false", "covid19"));
    let report = audit_bias(&net, &AuditSpec::new("stress", "covid19").selection(Evidence::from_pairs([("tested", "true")]).unwrap())).unwrap();
    assert!(report.reversal);
}

#[test]
fn contact_model_roughly_doubles_risk_yet_reverses_under_testing() {
    let net = models::build_contact_model().unwrap();
    let ratio = p(&net, &[("contact", "true")], "covid19", "true") / p(&net, &[("contact", "false")], "covid19", "true");
    assert!((1.8..=2.2).contains(&ratio), "{ratio}");
    assert!(p(&net, &[("tested", "true"), ("contact", "true")], "covid19", "true") < p(&net, &[("tested", "true"), ("contact", "false")], "covid19", "true"));
    assert!(p_do(&net, "contact", "true", "covid19") > p_do(&net, "contact", "false", "covid19"));
}

#[test]
fn unconfounded_stress_keeps_its_sign() {
    // equal stress rates in both strata and testing that ignores stress
    let mut draft = models::build_stress_model().unwrap().to_draft();
    let cpt = draft.cpts.iter_mut().find(|c| c.child == "stress").unwrap();
    cpt.rows = vec![vec![0.5, 0.5], vec![0.5, 0.5]];
    let net = draft.build().unwrap();
    let selected = p(&net, &[("tested", "true"), ("stress", "true")], "covid19", "true") - p(&net, &[("tested", "true"), ("stress", "false")], "covid19", "true");
    let causal = p_do(&net, "stress", "true", "covid19") - p_do(&net, "stress", "false", "covid19");
    assert!(selected * causal > 0.0, "{selected} {causal}");
}

#[test]
fn dating_selection_makes_looks_and_personality_compete() {
    let net = models::build_berkson_dating().unwrap();
    let att = p(&net, &[("looks", "attractive")], "personality", "nice");
    let unatt = p(&net, &[("looks", "unattractive")], "personality", "nice");
    assert!((att - unatt).abs() < 1e-15);
    assert!(p(&net, &[("date", "true"), ("looks", "attractive")], "personality", "nice") < p(&net, &[("date", "true"), ("looks", "unattractive")], "personality", "nice"));

    let mut draft = net.to_draft();
    let date = draft.cpts.iter_mut().find(|c| c.child == "date").unwrap();
    date.rows = vec![vec![0.4, 0.6]; 4];
    let flat = draft.build().unwrap();
    let contrast = p(&flat, &[("date", "true"), ("looks", "attractive")], "personality", "nice") - p(&flat, &[("date", "true"), ("looks", "unattractive")], "personality", "nice");
    assert!(contrast.abs() < 1e-15);
}

#[test]
fn path_classification_examples() {
    let simple = models::fixture("simple-smoking").unwrap();
    let paths = classify_paths(&simple, "smoker", "covid19", &[]).unwrap();
    assert_eq!(paths.len(), 1);
    assert_eq!(paths[0].to_string(), "smoker -> tested <- covid19");
    assert_eq!(paths[0].role_of("tested"), Some(NodeRole::Collider));
    assert!(!paths[0].open_given);
    assert!(classify_paths(&simple, "smoker", "covid19", &["tested"]).unwrap()[0].open_given);

    let stress = models::fixture("stress").unwrap();
    let paths = classify_paths(&stress, "stress", "covid19", &[]).unwrap();
    let shown: Vec<String> = paths.iter().map(|p| p.to_string()).collect();
    assert_eq!(shown[0], "stress -> covid19");
    assert!(shown.contains(&"stress <- healthcare -> covid19".to_string()), "{shown:?}");
    let fork = paths.iter().find(|p| p.nodes.len() == 3).unwrap();
    assert_eq!(fork.role_of("healthcare"), Some(NodeRole::Fork));
}

#[test]
fn audit_examples() {
    let tested = Evidence::from_pairs([("tested", "true")]).unwrap();
    let reversal = models::fixture("simple-smoking-p011").unwrap();
    let r = audit_bias(&reversal, &AuditSpec::new("smoker", "covid19").selection(tested.clone())).unwrap();
    assert!((r.selected_contrast - (22.0 / 111.0 - 5.0 / 23.0)).abs() < 1e-12);
    assert!((r.selected_contrast + 0.0192).abs() < 5e-5);
    assert!((r.interventional_contrast - 0.01).abs() < 1e-12);
    assert!(r.reversal);

    let null = models::fixture("simple-smoking").unwrap();
    let r = audit_bias(&null, &AuditSpec::new("smoker", "covid19").selection(tested.clone())).unwrap();
    assert_eq!(r.interventional_contrast, 0.0);
    assert!(!r.reversal);

    let rr = models::fixture("realistic-smoking-rr102").unwrap();
    let r = audit_bias(&rr, &AuditSpec::new("smoker", "covid19").selection(tested)).unwrap();
    assert!(r.selected_contrast < 0.0);
    assert!((r.interventional_probabilities.0 - 0.01122).abs() < 1e-9);
    assert!((r.interventional_probabilities.1 - 0.011).abs() < 1e-9);
    assert!(r.reversal);
}

#[test]
fn zero_relative_risk_gives_a_negative_selected_contrast() {
    let net = models::build_realistic_smoking(0.0).unwrap();
    let r = audit_bias(&net, &AuditSpec::new("smoker", "covid19").selection(Evidence::from_pairs([("tested", "true")]).unwrap())).unwrap();
    assert!(r.selected_contrast < 0.0);
}
