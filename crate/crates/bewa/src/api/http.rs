//! HTTP/1.1 + JSON binding of the query and audit surface with bearer-token
//! auth and per-principal fixed-window rate limiting.
//!
//! Endpoints:
//!   GET  /claims/{ccs}             claim view
//!   GET  /claims/{ccs}/trajectory  belief-evolution export
//!   GET  /audit/{ccs}              audit trajectory
//!   POST /query                    structured query
//!   POST /claims                   ingest one corpus entry
//!   POST /evidence                 apply one evidence fixture
//!
//! Environment: BEWA_BIND, BEWA_TOKENS_FILE, BEWA_RATE_LIMIT override the
//! corresponding config fields.

use crate::config::ApiConfig;
use crate::corpus::{CorpusEntry, EvidenceFixture};
use crate::engine::Engine;
use crate::error::BewaError;
use axum::extract::{Path as UrlPath, State};
use axum::http::{HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde_json::json;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Clone)]
pub struct AppState {
    pub engine: Arc<RwLock<Engine>>,
    pub tokens: Arc<Vec<String>>,
    pub rate_limit_per_minute: u32,
    limiter: Arc<Mutex<HashMap<String, (u64, u32)>>>,
}

impl AppState {
    /// Build from the engine's own api config section.
    pub fn from_engine(engine: Engine) -> Self {
        let api = engine.config.api.clone();
        Self::new(engine, &api)
    }

    pub fn new(engine: Engine, api: &ApiConfig) -> Self {
        let tokens = match std::env::var("BEWA_TOKENS_FILE") {
            Ok(path) => std::fs::read_to_string(path)
                .map(|text| {
                    text.lines()
                        .map(str::trim)
                        .filter(|l| !l.is_empty())
                        .map(str::to_owned)
                        .collect()
                })
                .unwrap_or_else(|_| api.tokens.clone()),
            Err(_) => api.tokens.clone(),
        };
        let rate = std::env::var("BEWA_RATE_LIMIT")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(api.rate_limit_per_minute);
        Self {
            engine: Arc::new(RwLock::new(engine)),
            tokens: Arc::new(tokens),
            rate_limit_per_minute: rate,
            limiter: Arc::new(Mutex::new(HashMap::new())),
        }
    }

    /// Authenticate and charge the principal's fixed one-minute window.
    fn admit(&self, headers: &HeaderMap) -> Result<String, Response> {
        let token = headers
            .get("authorization")
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.strip_prefix("Bearer "))
            .map(str::to_owned);
        let Some(token) = token else {
            return Err(error_response(StatusCode::UNAUTHORIZED, "missing bearer token"));
        };
        if !self.tokens.contains(&token) {
            return Err(error_response(StatusCode::UNAUTHORIZED, "unknown token"));
        }
        let minute = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .unwrap_or_default()
            .as_secs()
            / 60;
        let mut windows = self.limiter.lock().expect("limiter lock");
        let slot = windows.entry(token.clone()).or_insert((minute, 0));
        if slot.0 != minute {
            *slot = (minute, 0);
        }
        slot.1 += 1;
        if slot.1 > self.rate_limit_per_minute {
            return Err(error_response(StatusCode::TOO_MANY_REQUESTS, "rate limit exceeded"));
        }
        Ok(token)
    }
}

fn error_response(code: StatusCode, message: &str) -> Response {
    (code, Json(json!({ "error": message }))).into_response()
}

fn map_err(e: BewaError) -> Response {
    let code = match &e {
        BewaError::UnknownClaim(_) => StatusCode::NOT_FOUND,
        BewaError::AsOfInFuture | BewaError::BadFilter(_) | BewaError::MalformedCorpus(_) => {
            StatusCode::UNPROCESSABLE_ENTITY
        }
        BewaError::UnauthorizedWriter => StatusCode::FORBIDDEN,
        _ => StatusCode::INTERNAL_SERVER_ERROR,
    };
    error_response(code, &e.to_string())
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/claims/{ccs}", get(get_claim))
        .route("/claims/{ccs}/trajectory", get(get_trajectory))
        .route("/audit/{ccs}", get(get_audit))
        .route("/query", post(post_query))
        .route("/claims", post(post_claim))
        .route("/evidence", post(post_evidence))
        .with_state(state)
}

async fn get_claim(
    State(state): State<AppState>,
    headers: HeaderMap,
    UrlPath(ccs): UrlPath<String>,
) -> Response {
    if let Err(resp) = state.admit(&headers) {
        return resp;
    }
    let engine = state.engine.read().expect("engine lock");
    match super::claim_view(&engine, &ccs) {
        Ok(view) => Json(view).into_response(),
        Err(e) => map_err(e),
    }
}

async fn get_trajectory(
    State(state): State<AppState>,
    headers: HeaderMap,
    UrlPath(ccs): UrlPath<String>,
) -> Response {
    if let Err(resp) = state.admit(&headers) {
        return resp;
    }
    let engine = state.engine.read().expect("engine lock");
    match super::export_trajectory(&engine, &ccs) {
        Ok(doc) => Json(doc).into_response(),
        Err(e) => map_err(e),
    }
}

async fn get_audit(
    State(state): State<AppState>,
    headers: HeaderMap,
    UrlPath(ccs): UrlPath<String>,
) -> Response {
    if let Err(resp) = state.admit(&headers) {
        return resp;
    }
    let engine = state.engine.read().expect("engine lock");
    match super::audit(&engine, &ccs) {
        Ok(trajectory) => Json(trajectory).into_response(),
        Err(e) => map_err(e),
    }
}

async fn post_query(
    State(state): State<AppState>,
    headers: HeaderMap,
    body: Result<Json<super::QueryRequest>, axum::extract::rejection::JsonRejection>,
) -> Response {
    if let Err(resp) = state.admit(&headers) {
        return resp;
    }
    let Ok(Json(req)) = body else {
        return error_response(StatusCode::UNPROCESSABLE_ENTITY, "invalid query body");
    };
    let engine = state.engine.read().expect("engine lock");
    match super::query(&engine, &req) {
        Ok(resp) => Json(resp).into_response(),
        Err(e) => map_err(e),
    }
}

async fn post_claim(
    State(state): State<AppState>,
    headers: HeaderMap,
    body: Result<Json<CorpusEntry>, axum::extract::rejection::JsonRejection>,
) -> Response {
    if let Err(resp) = state.admit(&headers) {
        return resp;
    }
    let Ok(Json(entry)) = body else {
        return error_response(StatusCode::UNPROCESSABLE_ENTITY, "invalid claim body");
    };
    let now = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .unwrap_or_default()
        .as_secs() as i64;
    let mut engine = state.engine.write().expect("engine lock");
    match engine.ingest_corpus(std::slice::from_ref(&entry), now) {
        Ok(report) => {
            if report.accepted.len() == 1 {
                Json(json!({ "accepted": report.accepted[0] })).into_response()
            } else {
                (
                    StatusCode::UNPROCESSABLE_ENTITY,
                    Json(json!({ "rejected": report.rejected })),
                )
                    .into_response()
            }
        }
        Err(e) => map_err(e),
    }
}

async fn post_evidence(
    State(state): State<AppState>,
    headers: HeaderMap,
    body: Result<Json<EvidenceFixture>, axum::extract::rejection::JsonRejection>,
) -> Response {
    if let Err(resp) = state.admit(&headers) {
        return resp;
    }
    let Ok(Json(fixture)) = body else {
        return error_response(StatusCode::UNPROCESSABLE_ENTITY, "invalid evidence body");
    };
    let mut engine = state.engine.write().expect("engine lock");
    match engine.apply_evidence_fixture(&fixture) {
        Ok(()) => Json(json!({ "ok": true })).into_response(),
        Err(e) => map_err(e),
    }
}

/// Serve until the task is aborted. Fails fast when the bind address is
/// taken or invalid.
pub async fn serve(state: AppState, bind: &str) -> crate::error::Result<()> {
    let listener = tokio::net::TcpListener::bind(bind)
        .await
        .map_err(|e| BewaError::BindFailure(e.to_string()))?;
    axum::serve(listener, router(state))
        .await
        .map_err(|e| BewaError::BindFailure(e.to_string()))
}
