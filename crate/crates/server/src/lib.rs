//! HTTP API over the bncausal engine.
//!
//! | method | path | body | reply |
//! |---|---|---|---|
//! | GET | `/api/models` | | `[{id, name, source, variables, edges}]` |
//! | POST | `/api/models` | model document | `{id}` |
//! | GET | `/api/models/{id}` | | model document |
//! | POST | `/api/models/{id}/query` | `{evidence, do, targets}` | `{posteriors, evidence_probability}` |
//! | POST | `/api/models/{id}/audit` | `{exposure, outcome, outcome_state?, exposure_states?, selection}` | audit report |
//!
//! Errors are `{code, message, location?}` with status 400 for bad input,
//! 404 for unknown models and 422 for impossible evidence.

mod api;
mod registry;

use std::net::{Ipv4Addr, SocketAddr};
use std::path::Path;
use std::sync::Arc;

pub use api::{answer_query, router, ApiError, QueryRequest, QueryResponse};
pub use registry::{ModelSource, Registry, SessionModel, StartupError};

/// Loads the models directory, binds `127.0.0.1:port` and serves until
/// Ctrl-C or SIGTERM, letting in-flight requests finish.
pub async fn serve(port: u16, models_dir: &Path) -> Result<(), StartupError> {
    let registry = Arc::new(Registry::from_dir(models_dir)?);
    let addr = SocketAddr::from((Ipv4Addr::LOCALHOST, port));
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|source| StartupError::Bind { port, source })?;
    log::info!("listening on http://{}", listener.local_addr().map_or(addr, |a| a));
    axum::serve(listener, router(registry))
        .with_graceful_shutdown(shutdown_signal())
        .await
        .map_err(|source| StartupError::Bind { port, source })
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let terminate = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let terminate = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = terminate => {},
    }
    log::info!("shutting down");
}
