//! Routes and shared state.

use std::sync::{Arc, OnceLock};

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use imgany_core::{apply_adjective_filter, canonical, EmbeddingBank, EmbeddingSource, FusionConfig, LexiconKind};
use serde::Serialize;

use crate::error::ServiceError;
use crate::wire::{fuse_bundle, BankInfo, BanksResponse, ErrorBody, FuseRequest};

/// Largest accepted request body.
pub const BODY_LIMIT: usize = 8 * 1024 * 1024;

/// A validated bank pair: right kinds and one shared dimension.
#[derive(Debug)]
pub struct Banks {
    nouns: EmbeddingBank,
    adjectives: EmbeddingBank,
}

impl Banks {
    pub fn new(nouns: EmbeddingBank, adjectives: EmbeddingBank) -> Result<Self, ServiceError> {
        if nouns.kind() != LexiconKind::Noun {
            return Err(ServiceError::BankMismatch(format!("noun bank holds {} entries", nouns.kind())));
        }
        if adjectives.kind() != LexiconKind::Adjective {
            return Err(ServiceError::BankMismatch(format!("adjective bank holds {} entries", adjectives.kind())));
        }
        if nouns.dim() != adjectives.dim() {
            return Err(ServiceError::BankMismatch(format!(
                "noun dim {} differs from adjective dim {}",
                nouns.dim(),
                adjectives.dim()
            )));
        }
        Ok(Self { nouns, adjectives })
    }

    pub fn nouns(&self) -> &EmbeddingBank {
        &self.nouns
    }

    pub fn adjectives(&self) -> &EmbeddingBank {
        &self.adjectives
    }

    pub fn dim(&self) -> usize {
        self.nouns.dim()
    }
}

/// Default config plus the banks, which are set once when loading finishes.
/// That one-time set is the only synchronization in the service.
#[derive(Debug, Clone)]
pub struct AppState {
    defaults: Arc<FusionConfig>,
    banks: Arc<OnceLock<Banks>>,
}

impl AppState {
    pub fn new(defaults: FusionConfig) -> Self {
        Self { defaults: Arc::new(defaults), banks: Arc::new(OnceLock::new()) }
    }

    pub fn defaults(&self) -> &FusionConfig {
        &self.defaults
    }

    /// Marks the service ready. Only the first call has an effect.
    pub fn install(&self, banks: Banks) -> bool {
        self.banks.set(banks).is_ok()
    }

    pub fn banks(&self) -> Option<&Banks> {
        self.banks.get()
    }

    pub fn is_ready(&self) -> bool {
        self.banks.get().is_some()
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/v1/fuse", post(fuse))
        .route("/v1/banks", get(banks))
        .route("/v1/health", get(health))
        .layer(DefaultBodyLimit::max(BODY_LIMIT))
        .with_state(state)
}

fn json_response(status: StatusCode, body: &impl Serialize) -> Response {
    match canonical::to_vec(body) {
        Ok(bytes) => (status, [(header::CONTENT_TYPE, "application/json")], bytes).into_response(),
        Err(e) => {
            tracing::error!(error = %e, "response serialization failed");
            StatusCode::INTERNAL_SERVER_ERROR.into_response()
        }
    }
}

fn error_response(status: StatusCode, body: ErrorBody) -> Response {
    json_response(status, &body)
}

fn not_ready() -> Response {
    error_response(StatusCode::SERVICE_UNAVAILABLE, ErrorBody::new("NotReady", "service", "banks are still loading"))
}

async fn health(State(state): State<AppState>) -> Response {
    #[derive(Serialize)]
    struct Health {
        status: &'static str,
    }
    if state.is_ready() {
        json_response(StatusCode::OK, &Health { status: "ok" })
    } else {
        json_response(StatusCode::SERVICE_UNAVAILABLE, &Health { status: "loading" })
    }
}

async fn banks(State(state): State<AppState>) -> Response {
    let Some(b) = state.banks() else { return not_ready() };
    let filter = state.defaults().enable_adjective_filter;
    let filtered = apply_adjective_filter(b.adjectives(), filter).map(|v| v.len()).unwrap_or(0);
    let info = |bank: &EmbeddingBank, filtered_count| BankInfo {
        kind: bank.kind(),
        dim: bank.dim(),
        count: bank.count(),
        filtered_count,
    };
    json_response(
        StatusCode::OK,
        &BanksResponse { nouns: info(b.nouns(), b.nouns().count()), adjectives: info(b.adjectives(), filtered) },
    )
}

async fn fuse(State(state): State<AppState>, body: Bytes) -> Response {
    if !state.is_ready() {
        return not_ready();
    }
    let req: FuseRequest = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => {
            return error_response(
                StatusCode::BAD_REQUEST,
                ErrorBody::new("MalformedRequest", "request", e.to_string()),
            )
        }
    };
    let config = match &req.config {
        Some(o) => state.defaults().clone().with_overrides(o),
        None => state.defaults().clone(),
    };
    // Retrieval is CPU-bound; keep it off the async workers.
    let st = state.clone();
    let result = tokio::task::spawn_blocking(move || {
        let b = st.banks().expect("readiness checked above");
        fuse_bundle(req.features, b.nouns(), b.adjectives(), &config)
    })
    .await;
    match result {
        Ok(Ok(bundle)) => json_response(StatusCode::OK, &bundle),
        Ok(Err(e)) => error_response(StatusCode::BAD_REQUEST, ErrorBody::from(&e)),
        Err(e) => {
            tracing::error!(error = %e, "fusion task failed");
            error_response(StatusCode::INTERNAL_SERVER_ERROR, ErrorBody::new("Internal", "service", e.to_string()))
        }
    }
}
