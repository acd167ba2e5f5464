//! Exact inference, graph surgery and selection-bias audits for discrete
//! causal Bayesian networks.
//!
//! ```
//! use bncausal::{models, query_posterior, Evidence};
//!
//! let net = models::build_simple_smoking(0.10).unwrap();
//! let ev = Evidence::from_pairs([("tested", "true"), ("smoker", "true")]).unwrap();
//! let post = query_posterior(&net, &ev, "covid19").unwrap();
//! assert!((post.probability_of("true").unwrap() - 2.0 / 11.0).abs() < 1e-12);
//! ```

pub mod causal;
pub mod error;
pub mod factor;
pub mod inference;
pub mod io;
pub mod models;
pub mod network;

pub use causal::{
    apply_do, apply_interventions, audit_bias, classify_paths, classify_paths_with_limit, d_separated,
    interventional_query, interventional_query_many, AuditSpec, BiasAuditReport, EdgeDirection, Intervention,
    NodeRole, PathReport, DEFAULT_PATH_LIMIT,
};
pub use error::{BnError, Result};
pub use factor::Factor;
pub use inference::{
    elimination_order, enumerate_joint, enumerate_joint_with_cap, evidence_probability, marginals_given, prior_marginals,
    query_posterior, query_posterior_with_order, QueryResult, DEFAULT_JOINT_CAP,
};
pub use network::{
    topological_order, validate_network, Cpt, DiscreteVariable, Evidence, Network, NetworkDraft,
    ValidationReport, Violation, ViolationCode, ROW_SUM_TOLERANCE,
};
