//! Exact posterior computation.
//!
//! [`query_posterior`] runs sum-product variable elimination: CPT factors are
//! reduced by the evidence first, then the remaining non-target variables are
//! summed out in min-fill order. [`enumerate_joint`] computes the same quantity
//! by brute force over the full joint and exists to check the former.

use indexmap::IndexMap;
use serde::Serialize;

use crate::error::{BnError, Result};
use crate::factor::Factor;
use crate::network::{Evidence, Network};

/// Default bound on the number of joint configurations [`enumerate_joint`] visits.
pub const DEFAULT_JOINT_CAP: u128 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryResult {
    pub target: String,
    pub states: Vec<String>,
    pub distribution: Vec<f64>,
    /// Prior probability of the conditioning evidence; exactly 1 without evidence.
    pub evidence_probability: f64,
}

impl QueryResult {
    pub fn probability_of(&self, state: &str) -> Option<f64> {
        self.states
            .iter()
            .position(|s| s == state)
            .map(|i| self.distribution[i])
    }

    pub fn to_map(&self) -> IndexMap<String, f64> {
        self.states
            .iter()
            .cloned()
            .zip(self.distribution.iter().copied())
            .collect()
    }
}

/// Min-fill elimination order over the moral graph for every variable not in
/// `keep`. Ties go to the earlier-declared variable. Unknown ids in `keep` are
/// ignored.
pub fn elimination_order(network: &Network, keep: &[&str]) -> Vec<String> {
    let n = network.len();
    let mut adjacent = vec![vec![false; n]; n];
    let mut link = |a: usize, b: usize| {
        if a != b {
            adjacent[a][b] = true;
            adjacent[b][a] = true;
        }
    };
    for child in 0..n {
        let parents = network.parents(child);
        for (i, &p) in parents.iter().enumerate() {
            link(p, child);
            for &q in &parents[i + 1..] {
                link(p, q);
            }
        }
    }

    let kept: Vec<bool> = (0..n)
        .map(|i| keep.contains(&network.variable(i).id.as_str()))
        .collect();
    let mut alive = vec![true; n];
    let mut order = Vec::new();
    loop {
        let mut best: Option<(usize, usize)> = None;
        for v in (0..n).filter(|&v| alive[v] && !kept[v]) {
            let neighbours: Vec<usize> = (0..n).filter(|&u| alive[u] && adjacent[v][u]).collect();
            let mut fill = 0;
            for (i, &a) in neighbours.iter().enumerate() {
                for &b in &neighbours[i + 1..] {
                    if !adjacent[a][b] {
                        fill += 1;
                    }
                }
            }
            if best.is_none_or(|(_, f)| fill < f) {
                best = Some((v, fill));
            }
        }
        let Some((v, _)) = best else { break };
        let neighbours: Vec<usize> = (0..n).filter(|&u| alive[u] && adjacent[v][u]).collect();
        for (i, &a) in neighbours.iter().enumerate() {
            for &b in &neighbours[i + 1..] {
                adjacent[a][b] = true;
                adjacent[b][a] = true;
            }
        }
        alive[v] = false;
        order.push(network.variable(v).id.clone());
    }
    order
}

/// P(target | evidence) by variable elimination with min-fill ordering.
pub fn query_posterior(network: &Network, evidence: &Evidence, target: &str) -> Result<QueryResult> {
    check_query(network, evidence, target)?;
    let mut keep: Vec<&str> = evidence.variables().collect();
    keep.push(target);
    let order = elimination_order(network, &keep);
    eliminate(network, evidence, target, &order)
}

/// [`query_posterior`] with a caller-chosen elimination order, which must list
/// every variable that is neither the target nor observed, each exactly once.
pub fn query_posterior_with_order(
    network: &Network,
    evidence: &Evidence,
    target: &str,
    order: &[String],
) -> Result<QueryResult> {
    check_query(network, evidence, target)?;
    let mut expected: Vec<&str> = network
        .variables()
        .iter()
        .map(|v| v.id.as_str())
        .filter(|&v| v != target && !evidence.contains(v))
        .collect();
    let mut given: Vec<&str> = order.iter().map(String::as_str).collect();
    expected.sort_unstable();
    given.sort_unstable();
    if expected != given {
        return Err(BnError::InvalidArgument(format!(
            "elimination order must be a permutation of [{}]",
            expected.join(", ")
        )));
    }
    eliminate(network, evidence, target, order)
}

fn check_query(network: &Network, evidence: &Evidence, target: &str) -> Result<()> {
    network.require(target)?;
    if evidence.contains(target) {
        return Err(BnError::TargetInEvidence(target.to_string()));
    }
    network.resolve(evidence)?;
    Ok(())
}

/// Reduces every CPT by the evidence, sums out `order`, and multiplies what
/// remains.
fn sum_product(network: &Network, evidence: &Evidence, order: &[String]) -> Result<Factor> {
    let mut factors: Vec<Factor> = (0..network.len())
        .map(|i| Factor::from_cpt(network, i).reduce_evidence(network, evidence))
        .collect::<Result<_>>()?;

    for var in order {
        let (touching, rest): (Vec<Factor>, Vec<Factor>) = factors.into_iter().partition(|f| f.contains(var));
        factors = rest;
        if touching.is_empty() {
            continue;
        }
        let product = touching
            .iter()
            .try_fold(Factor::unit(), |acc, f| acc.product(f))?;
        factors.push(product.marginalize(var)?);
    }

    factors.iter().try_fold(Factor::unit(), |acc, f| acc.product(f))
}

fn eliminate(network: &Network, evidence: &Evidence, target: &str, order: &[String]) -> Result<QueryResult> {
    let joint = sum_product(network, evidence, order)?;
    let ti = network.require(target)?;
    let unnormalized: Vec<f64> = if joint.scope().is_empty() {
        // target's CPT was reduced away entirely; cannot happen for a valid query
        return Err(BnError::NotInScope(target.to_string()));
    } else {
        debug_assert_eq!(joint.scope(), [target]);
        joint.values().to_vec()
    };
    finish(network, ti, evidence, unnormalized)
}

fn finish(network: &Network, target: usize, evidence: &Evidence, unnormalized: Vec<f64>) -> Result<QueryResult> {
    let z: f64 = unnormalized.iter().sum();
    if !z.is_finite() || z <= 0.0 {
        return Err(BnError::ImpossibleEvidence);
    }
    let var = network.variable(target);
    Ok(QueryResult {
        target: var.id.clone(),
        states: var.states.clone(),
        distribution: unnormalized.iter().map(|v| v / z).collect(),
        evidence_probability: if evidence.is_empty() { 1.0 } else { z },
    })
}

/// P(evidence), exactly 1 for empty evidence and possibly 0.
pub fn evidence_probability(network: &Network, evidence: &Evidence) -> Result<f64> {
    network.resolve(evidence)?;
    if evidence.is_empty() {
        return Ok(1.0);
    }
    let keep: Vec<&str> = evidence.variables().collect();
    let order = elimination_order(network, &keep);
    Ok(sum_product(network, evidence, &order)?.total())
}

/// Marginal distribution of every variable with no evidence, in declaration order.
pub fn prior_marginals(network: &Network) -> Result<IndexMap<String, Vec<f64>>> {
    marginals_given(network, &Evidence::new())
}

/// Posterior of every variable given `evidence`, in declaration order.
/// Observed variables are reported as point masses on their observed state.
pub fn marginals_given(network: &Network, evidence: &Evidence) -> Result<IndexMap<String, Vec<f64>>> {
    if evidence_probability(network, evidence)? == 0.0 {
        return Err(BnError::ImpossibleEvidence);
    }
    let mut out = IndexMap::new();
    for var in network.variables() {
        let dist = match evidence.get(&var.id) {
            Some(state) => {
                let mut point = vec![0.0; var.cardinality()];
                point[network.state_index(&var.id, state)?] = 1.0;
                point
            }
            None => query_posterior(network, evidence, &var.id)?.distribution,
        };
        out.insert(var.id.clone(), dist);
    }
    Ok(out)
}

/// Brute-force P(target | evidence) over the full joint, capped at
/// [`DEFAULT_JOINT_CAP`] configurations.
pub fn enumerate_joint(network: &Network, evidence: &Evidence, target: &str) -> Result<QueryResult> {
    enumerate_joint_with_cap(network, evidence, target, DEFAULT_JOINT_CAP)
}

pub fn enumerate_joint_with_cap(network: &Network, evidence: &Evidence, target: &str, cap: u128) -> Result<QueryResult> {
    check_query(network, evidence, target)?;
    let size: u128 = (0..network.len()).map(|i| network.cardinality(i) as u128).product();
    if size > cap {
        return Err(BnError::StateSpaceTooLarge { size, cap });
    }
    let ti = network.require(target)?;
    let observed = network.resolve(evidence)?;
    let n = network.len();
    let mut totals = vec![0.0; network.cardinality(ti)];
    let mut assignment = vec![0usize; n];
    'outer: loop {
        if observed.iter().all(|&(v, s)| assignment[v] == s) {
            let p: f64 = (0..n)
                .map(|i| network.conditional(i, &assignment)[assignment[i]])
                .product();
            totals[assignment[ti]] += p;
        }
        for d in (0..n).rev() {
            assignment[d] += 1;
            if assignment[d] < network.cardinality(d) {
                continue 'outer;
            }
            assignment[d] = 0;
        }
        break;
    }
    finish(network, ti, evidence, totals)
}
