use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use bncausal::io::{parse_model_document, ParseError};
use bncausal::{audit_bias, interventional_query_many, AuditSpec, BnError, DiscreteVariable, Evidence, Intervention};
use indexmap::IndexMap;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::registry::{ModelSource, Registry, SessionModel};

/// Error body: `{code, message, location?}`.
#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: String,
    message: String,
    location: Option<Box<Value>>,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code: code.to_string(),
            message: message.into(),
            location: None,
        }
    }

    fn unknown_model(id: &str) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, "UNKNOWN_MODEL", format!("no model with id `{id}`"))
    }
}

impl From<BnError> for ApiError {
    fn from(e: BnError) -> Self {
        let status = match e {
            BnError::ImpossibleEvidence | BnError::StateSpaceTooLarge { .. } => StatusCode::UNPROCESSABLE_ENTITY,
            _ => StatusCode::BAD_REQUEST,
        };
        ApiError::new(status, e.code(), e.to_string())
    }
}

impl From<ParseError> for ApiError {
    fn from(e: ParseError) -> Self {
        let mut location = json!({"line": e.line, "column": e.column});
        if let Some(token) = &e.token {
            location["token"] = json!(token);
        }
        if let Some(row) = e.row {
            location["row"] = json!(row);
        }
        ApiError {
            status: StatusCode::BAD_REQUEST,
            code: e.code,
            message: e.message,
            location: Some(Box::new(location)),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({"code": self.code, "message": self.message});
        if let Some(location) = self.location {
            body["location"] = *location;
        }
        (self.status, Json(body)).into_response()
    }
}

/// Decodes a JSON body, reporting the line and column of malformed input.
fn decode<T: DeserializeOwned>(body: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| {
        let code = match e.classify() {
            serde_json::error::Category::Data => "INVALID_REQUEST",
            _ => "SYNTAX",
        };
        let message = e.to_string();
        let message = message.rsplit_once(" at line ").map_or(message.as_str(), |(m, _)| m).to_string();
        ApiError {
            status: StatusCode::BAD_REQUEST,
            code: code.to_string(),
            message,
            location: Some(Box::new(json!({"line": e.line().max(1), "column": e.column().max(1)}))),
        }
    })
}

#[derive(Serialize)]
struct ModelSummary<'a> {
    id: &'a str,
    name: &'a str,
    source: ModelSource,
    variables: &'a [DiscreteVariable],
    edges: Vec<(String, String)>,
}

fn summary(m: &SessionModel) -> ModelSummary<'_> {
    ModelSummary {
        id: &m.id,
        name: m.network.name(),
        source: m.source,
        variables: m.network.variables(),
        edges: m.network.edges(),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryRequest {
    #[serde(default)]
    pub evidence: Evidence,
    #[serde(default, rename = "do")]
    pub interventions: IndexMap<String, String>,
    /// Every free variable when empty.
    #[serde(default)]
    pub targets: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct QueryResponse {
    pub posteriors: IndexMap<String, IndexMap<String, f64>>,
    pub evidence_probability: f64,
}

/// The query endpoint's computation, free of HTTP concerns.
pub fn answer_query(model: &SessionModel, req: &QueryRequest) -> Result<QueryResponse, ApiError> {
    let net = &model.network;
    let interventions: Vec<Intervention> = req
        .interventions
        .iter()
        .map(|(v, s)| Intervention::new(v, s))
        .collect();
    let targets: Vec<String> = if req.targets.is_empty() {
        net.variables()
            .iter()
            .map(|v| v.id.clone())
            .filter(|v| !req.evidence.contains(v) && !req.interventions.contains_key(v))
            .collect()
    } else {
        req.targets.clone()
    };
    if targets.is_empty() {
        return Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            "INVALID_ARGUMENT",
            "every variable is observed or intervened on; nothing to query",
        ));
    }
    let mut posteriors = IndexMap::new();
    let mut evidence_probability = 1.0;
    for target in &targets {
        let r = interventional_query_many(net, &interventions, &req.evidence, target)?;
        evidence_probability = r.evidence_probability;
        posteriors.insert(target.clone(), r.to_map());
    }
    Ok(QueryResponse {
        posteriors,
        evidence_probability,
    })
}

type Shared = State<Arc<Registry>>;

fn lookup(registry: &Registry, id: &str) -> Result<Arc<SessionModel>, ApiError> {
    registry.get(id).ok_or_else(|| ApiError::unknown_model(id))
}

async fn list_models(State(registry): Shared) -> Response {
    let models = registry.list();
    let body: Vec<ModelSummary<'_>> = models.iter().map(|m| summary(m)).collect();
    Json(body).into_response()
}

async fn upload_model(State(registry): Shared, body: Bytes) -> Result<(StatusCode, Json<Value>), ApiError> {
    let doc = parse_model_document(&body)?;
    let model = registry.upload(doc);
    Ok((StatusCode::CREATED, Json(json!({"id": model.id}))))
}

async fn get_model(State(registry): Shared, Path(id): Path<String>) -> Result<Response, ApiError> {
    let model = lookup(&registry, &id)?;
    Ok(([(header::CONTENT_TYPE, "application/json")], model.document.clone()).into_response())
}

async fn query(State(registry): Shared, Path(id): Path<String>, body: Bytes) -> Result<Json<QueryResponse>, ApiError> {
    let model = lookup(&registry, &id)?;
    let req: QueryRequest = decode(&body)?;
    answer_query(&model, &req).map(Json)
}

async fn audit(State(registry): Shared, Path(id): Path<String>, body: Bytes) -> Result<Response, ApiError> {
    let model = lookup(&registry, &id)?;
    let spec: AuditSpec = decode(&body)?;
    let report = audit_bias(&model.network, &spec)?;
    Ok(Json(report).into_response())
}

async fn not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "NOT_FOUND", "no such endpoint")
}

pub fn router(registry: Arc<Registry>) -> Router {
    Router::new()
        .route("/api/models", get(list_models).post(upload_model))
        .route("/api/models/{id}", get(get_model))
        .route("/api/models/{id}/query", post(query))
        .route("/api/models/{id}/audit", post(audit))
        .fallback(not_found)
        .with_state(registry)
}
