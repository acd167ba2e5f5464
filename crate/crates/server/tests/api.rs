use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use bncausal::models::fixture;
use bncausal::{audit_bias, query_posterior, AuditSpec, Evidence};
use bncausal_server::{router, Registry};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

fn app() -> axum::Router {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models");
    router(Arc::new(Registry::from_dir(&dir).unwrap()))
}

async fn send(app: &axum::Router, method: &str, uri: &str, body: &str) -> (StatusCode, Vec<u8>) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(Body::from(body.to_string()))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    (status, resp.into_body().collect().await.unwrap().to_bytes().to_vec())
}

async fn send_json(app: &axum::Router, method: &str, uri: &str, body: &str) -> (StatusCode, Value) {
    let (status, bytes) = send(app, method, uri, body).await;
    (status, serde_json::from_slice(&bytes).unwrap())
}

#[tokio::test]
async fn bundled_models_are_listed() {
    let (status, body) = send_json(&app(), "GET", "/api/models", "").await;
    assert_eq!(status, StatusCode::OK);
    let ids: Vec<&str> = body.as_array().unwrap().iter().map(|m| m["id"].as_str().unwrap()).collect();
    assert!(ids.contains(&"simple-smoking"), "{ids:?}");
    let simple = body.as_array().unwrap().iter().find(|m| m["id"] == "simple-smoking").unwrap();
    assert_eq!(simple["source"], "bundled");
    assert_eq!(simple["edges"], json!([["smoker", "tested"], ["covid19", "tested"]]));
}

#[tokio::test]
async fn query_matches_the_library() {
    let app = app();
    let (status, body) = send_json(
        &app,
        "POST",
        "/api/models/simple-smoking/query",
        r#"{"evidence": {"tested": "true", "smoker": "true"}, "targets": ["covid19"]}"#,
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    let got = body["posteriors"]["covid19"]["true"].as_f64().unwrap();
    assert!((got - 0.18182).abs() < 5e-6);
    let ev = Evidence::from_pairs([("tested", "true"), ("smoker", "true")]).unwrap();
    let direct = query_posterior(&fixture("simple-smoking").unwrap(), &ev, "covid19").unwrap();
    assert_eq!(got, direct.distribution[0]);
    assert_eq!(body["evidence_probability"].as_f64().unwrap(), direct.evidence_probability);
}

#[tokio::test]
async fn do_and_default_targets() {
    let (status, body) = send_json(
        &app(),
        "POST",
        "/api/models/realistic-smoking-rr102/query",
        r#"{"do": {"smoker": "true"}}"#,
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    let posteriors = body["posteriors"].as_object().unwrap();
    assert!(!posteriors.contains_key("smoker"));
    assert!((posteriors["covid19"]["true"].as_f64().unwrap() - 0.01122).abs() < 1e-12);
}

#[tokio::test]
async fn impossible_evidence_is_422() {
    let app = app();
    let upload = bncausal::io::serialize_model(&bncausal::models::build_simple_smoking(0.0).unwrap());
    let (status, body) = send_json(&app, "POST", "/api/models", &upload).await;
    assert_eq!(status, StatusCode::CREATED);
    let id = body["id"].as_str().unwrap().to_string();
    let (status, body) = send_json(
        &app,
        "POST",
        &format!("/api/models/{id}/query"),
        r#"{"evidence": {"smoker": "true", "covid19": "true"}, "targets": ["tested"]}"#,
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["code"], "IMPOSSIBLE_EVIDENCE");
}

#[tokio::test]
async fn malformed_bodies_are_positioned() {
    let app = app();
    let (status, body) = send_json(&app, "POST", "/api/models/simple-smoking/query", "{\n  \"evidence\": {,}\n}").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "SYNTAX");
    assert_eq!(body["location"]["line"], 2);

    let (status, body) = send_json(&app, "POST", "/api/models", "{\"format_version\": 1, \"name\": 3}").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["location"]["line"], 1);

    let (status, body) = send_json(&app, "POST", "/api/models/simple-smoking/query", r#"{"evidence": {"nope": "true"}}"#).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "UNKNOWN_VARIABLE");
}

#[tokio::test]
async fn unknown_model_is_404() {
    let (status, body) = send_json(&app(), "POST", "/api/models/nope/query", "{}").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["code"], "UNKNOWN_MODEL");
    let (status, _) = send(&app(), "GET", "/api/models/nope", "").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn model_document_round_trips() {
    let (status, bytes) = send(&app(), "GET", "/api/models/stress", "").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(String::from_utf8(bytes).unwrap(), bncausal::models::fixture_text("stress").unwrap());
}

#[tokio::test]
async fn audit_matches_the_library() {
    let (status, body) = send_json(
        &app(),
        "POST",
        "/api/models/realistic-smoking-rr102/audit",
        r#"{"exposure": "smoker", "outcome": "covid19", "selection": {"tested": "true"}}"#,
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    let spec = AuditSpec::new("smoker", "covid19").selection(Evidence::from_pairs([("tested", "true")]).unwrap());
    let direct = audit_bias(&fixture("realistic-smoking-rr102").unwrap(), &spec).unwrap();
    assert_eq!(body, serde_json::to_value(&direct).unwrap());
    assert_eq!(body["reversal"], true);
}

#[tokio::test]
async fn concurrent_identical_requests_agree() {
    let app = app();
    let body = r#"{"evidence": {"tested": "true"}}"#;
    let handles: Vec<_> = (0..16)
        .map(|_| {
            let app = app.clone();
            tokio::spawn(async move { send(&app, "POST", "/api/models/realistic-smoking/query", body).await })
        })
        .collect();
    let mut replies = Vec::new();
    for h in handles {
        replies.push(h.await.unwrap());
    }
    assert!(replies.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn unreadable_directory_fails_startup() {
    assert!(Registry::from_dir(std::path::Path::new("/definitely/not/here")).is_err());
}
