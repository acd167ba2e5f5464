use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};

use bncausal::io::{parse_model_document, serialize_model_with_metadata, ModelDocument, ParseError};
use bncausal::Network;
use indexmap::IndexMap;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelSource {
    Bundled,
    Uploaded,
}

/// A registered network. Never changes once registered.
#[derive(Debug)]
pub struct SessionModel {
    pub id: String,
    pub source: ModelSource,
    pub network: Network,
    /// Canonical model document text served by `GET /api/models/{id}`.
    pub document: String,
}

#[derive(Debug, thiserror::Error)]
pub enum StartupError {
    #[error("cannot read models directory {path}: {source}")]
    Unreadable { path: PathBuf, source: std::io::Error },
    #[error("{path}:{error}")]
    InvalidModel { path: PathBuf, error: Box<ParseError> },
    #[error("cannot bind port {port}: {source}")]
    Bind { port: u16, source: std::io::Error },
}

/// Append-only model store shared by every handler.
#[derive(Debug, Default)]
pub struct Registry {
    models: RwLock<IndexMap<String, Arc<SessionModel>>>,
    uploads: AtomicU64,
}

impl Registry {
    pub fn new() -> Self {
        Registry::default()
    }

    /// Registers every `*.json` model in `dir` under its file stem, in file
    /// name order.
    pub fn from_dir(dir: &Path) -> Result<Registry, StartupError> {
        let unreadable = |source| StartupError::Unreadable {
            path: dir.to_path_buf(),
            source,
        };
        let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
            .map_err(unreadable)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        let registry = Registry::new();
        for path in paths {
            let bytes = std::fs::read(&path).map_err(|source| StartupError::Unreadable {
                path: path.clone(),
                source,
            })?;
            let doc = parse_model_document(&bytes).map_err(|error| StartupError::InvalidModel {
                path: path.clone(),
                error: Box::new(error),
            })?;
            let id = path.file_stem().expect("json files have stems").to_string_lossy().into_owned();
            registry.insert(id, ModelSource::Bundled, doc);
        }
        Ok(registry)
    }

    fn insert(&self, id: String, source: ModelSource, doc: ModelDocument) -> Arc<SessionModel> {
        let model = Arc::new(SessionModel {
            id: id.clone(),
            source,
            document: serialize_model_with_metadata(&doc.network, &doc.metadata),
            network: doc.network,
        });
        log::info!("registered {} model `{id}`", if source == ModelSource::Bundled { "bundled" } else { "uploaded" });
        self.models
            .write()
            .expect("registry lock poisoned")
            .insert(id, Arc::clone(&model));
        model
    }

    /// Registers an uploaded document under a fresh id.
    pub fn upload(&self, doc: ModelDocument) -> Arc<SessionModel> {
        loop {
            let n = self.uploads.fetch_add(1, Ordering::Relaxed) + 1;
            let id = format!("uploaded-{n}");
            if self.get(&id).is_none() {
                return self.insert(id, ModelSource::Uploaded, doc);
            }
        }
    }

    pub fn get(&self, id: &str) -> Option<Arc<SessionModel>> {
        self.models.read().expect("registry lock poisoned").get(id).cloned()
    }

    pub fn list(&self) -> Vec<Arc<SessionModel>> {
        self.models.read().expect("registry lock poisoned").values().cloned().collect()
    }
}
