//! Stateless JSON scoring service.
//!
//! Every response body is produced by [`render_machine`], so a scored audit
//! comes back byte-for-byte as `ers score --format machine` prints it.

// Handlers return `Result<Response, Response>`; both arms are full responses.
#![allow(clippy::result_large_err)]

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use ers_core::audit::FrameworkRef;
use ers_core::{
    build_document, render_machine, Audit, ConsensusWeights, Engine, FrameworkDefinition, QuestionTag, ScoreError,
    ScoringMode, ValidationError,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::config::Defaults;
use crate::registry::Registry;

#[derive(Clone)]
struct AppState {
    registry: Arc<Registry>,
    defaults: Defaults,
}

pub fn router(registry: Registry, defaults: Defaults) -> Router {
    let state = AppState {
        registry: Arc::new(registry),
        defaults,
    };
    Router::new()
        .route("/v1/health", get(health))
        .route("/v1/frameworks", get(list_frameworks))
        .route("/v1/frameworks/{id}", get(show_framework))
        .route("/v1/frameworks/{id}/score", post(score))
        .route("/v1/frameworks/{id}/whatif", post(whatif))
        .route("/v1/frameworks/{id}/validate", post(validate))
        .with_state(state)
}

/// Serves until interrupted. Binds exactly `addr`; callers choose loopback
/// unless told otherwise.
pub async fn serve(addr: SocketAddr, app: Router) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("ers service listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoreRequest {
    pub audit: Audit,
    #[serde(default)]
    pub mode: Option<ScoringMode>,
    #[serde(default)]
    pub weights: Option<ConsensusWeights>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WhatIfRequest {
    pub audit: Audit,
    pub question: QuestionTag,
    pub answer: String,
    #[serde(default)]
    pub mode: Option<ScoringMode>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateRequest {
    pub audit: Audit,
}

#[derive(Debug, Serialize)]
pub struct ValidationResponse {
    pub framework: FrameworkRef,
    pub valid: bool,
    pub errors: Vec<ValidationError>,
}

#[derive(Debug, Serialize)]
struct ErrorBody<'a> {
    error: &'a str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    framework: Option<FrameworkRef>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    errors: Vec<ValidationError>,
}

#[derive(Debug, Serialize)]
struct FrameworkSummary<'a> {
    id: &'a str,
    version: &'a str,
    default_mode: ScoringMode,
}

#[derive(Debug, Serialize)]
struct FrameworkDocument<'a> {
    definition: &'a FrameworkDefinition,
    /// Each dimension's formula and the total, as DSL strings.
    formulas: BTreeMap<String, String>,
}

fn json(status: StatusCode, body: &impl Serialize) -> Response {
    (
        status,
        [(header::CONTENT_TYPE, "application/json")],
        render_machine(body),
    )
        .into_response()
}

fn framework_ref(fw: &FrameworkDefinition) -> FrameworkRef {
    FrameworkRef {
        id: fw.id.clone(),
        version: fw.version.clone(),
    }
}

fn error(status: StatusCode, code: &str, message: String) -> Response {
    json(
        status,
        &ErrorBody {
            error: code,
            message,
            framework: None,
            errors: Vec::new(),
        },
    )
}

fn invalid(fw: &FrameworkDefinition, errors: Vec<ValidationError>) -> Response {
    json(
        StatusCode::UNPROCESSABLE_ENTITY,
        &ErrorBody {
            error: "validation_failed",
            message: format!("{} validation error(s)", errors.len()),
            framework: Some(framework_ref(fw)),
            errors,
        },
    )
}

fn score_error(fw: &FrameworkDefinition, e: ScoreError) -> Response {
    match e {
        ScoreError::Invalid(errors) => invalid(fw, errors),
        other => error(StatusCode::INTERNAL_SERVER_ERROR, "internal", other.to_string()),
    }
}

fn engine(state: &AppState, id: &str) -> Result<Arc<Engine>, Response> {
    state.registry.get(id).ok_or_else(|| {
        error(
            StatusCode::NOT_FOUND,
            "unknown_framework",
            format!("no framework with id {id:?}"),
        )
    })
}

fn parse<T: DeserializeOwned>(body: &[u8]) -> Result<T, Response> {
    serde_json::from_slice(body).map_err(|e| error(StatusCode::BAD_REQUEST, "malformed_body", e.to_string()))
}

async fn health() -> Response {
    #[derive(Serialize)]
    struct Health {
        status: &'static str,
        version: &'static str,
    }
    json(
        StatusCode::OK,
        &Health {
            status: "ok",
            version: env!("CARGO_PKG_VERSION"),
        },
    )
}

async fn list_frameworks(State(state): State<AppState>) -> Response {
    let list: Vec<_> = state
        .registry
        .frameworks()
        .map(|fw| FrameworkSummary {
            id: &fw.id,
            version: &fw.version,
            default_mode: fw.default_mode,
        })
        .collect();
    json(StatusCode::OK, &list)
}

async fn show_framework(State(state): State<AppState>, Path(id): Path<String>) -> Result<Response, Response> {
    let engine = engine(&state, &id)?;
    let fw = engine.framework();
    let mut formulas: BTreeMap<String, String> = fw
        .dimensions
        .iter()
        .map(|d| (d.symbol.to_string(), d.formula.to_string()))
        .collect();
    formulas.insert("total".into(), fw.total_formula.to_string());
    Ok(json(
        StatusCode::OK,
        &FrameworkDocument {
            definition: fw,
            formulas,
        },
    ))
}

async fn score(State(state): State<AppState>, Path(id): Path<String>, body: Bytes) -> Result<Response, Response> {
    let engine = engine(&state, &id)?;
    let req: ScoreRequest = parse(&body)?;
    let weights = req
        .weights
        .map(ConsensusWeights::validated)
        .transpose()
        .map_err(|e| error(StatusCode::BAD_REQUEST, "malformed_body", e.to_string()))?
        .unwrap_or(state.defaults.weights);
    match build_document(&engine, &req.audit, req.mode.or(state.defaults.mode), &weights) {
        Ok(doc) => Ok(json(StatusCode::OK, &doc)),
        Err(ers_core::report::ReportError::Score(e)) => Err(score_error(engine.framework(), e)),
        Err(e) => Err(error(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string())),
    }
}

async fn whatif(State(state): State<AppState>, Path(id): Path<String>, body: Bytes) -> Result<Response, Response> {
    let engine = engine(&state, &id)?;
    let req: WhatIfRequest = parse(&body)?;
    engine
        .what_if(&req.audit, req.question, &req.answer, req.mode.or(state.defaults.mode))
        .map(|delta| json(StatusCode::OK, &delta))
        .map_err(|e| score_error(engine.framework(), e))
}

async fn validate(State(state): State<AppState>, Path(id): Path<String>, body: Bytes) -> Result<Response, Response> {
    let engine = engine(&state, &id)?;
    let req: ValidateRequest = parse(&body)?;
    let errors = engine.validate(&req.audit);
    Ok(json(
        StatusCode::OK,
        &ValidationResponse {
            framework: framework_ref(engine.framework()),
            valid: errors.is_empty(),
            errors,
        },
    ))
}
