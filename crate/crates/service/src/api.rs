use std::collections::BTreeSet;
use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;

use prooftutor::document::{outline, FormulaRef};
use prooftutor::kernel::rule_catalog;
use prooftutor::present::{render_proof_nl, tree_to_view, ProofExport};
use prooftutor::search::{simplify, ProverConfig, SimplifyOptions};

use crate::library::{Library, LibraryError};
use crate::store::ProofRecord;
use crate::tasks::{InterruptError, TaskManager};

#[derive(Clone)]
pub struct AppState {
    pub library: Arc<Library>,
    pub tasks: Arc<TaskManager>,
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/documents", get(list_documents))
        .route("/documents/{id}/outline", get(document_outline))
        .route("/rules", get(rules))
        .route("/prove", post(submit))
        .route("/tasks/{id}", get(task))
        .route("/tasks/{id}/interrupt", post(interrupt))
        .route("/proofs/{key}/{version}", get(proof))
        .route("/proofs/{key}/{version}/simplify", post(simplify_proof))
        .with_state(state)
}

struct ApiError(StatusCode, String);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(json!({ "error": self.1 }))).into_response()
    }
}

fn not_found(what: impl Into<String>) -> ApiError {
    ApiError(StatusCode::NOT_FOUND, what.into())
}

fn internal(e: impl std::fmt::Display) -> ApiError {
    ApiError(StatusCode::INTERNAL_SERVER_ERROR, e.to_string())
}

type ApiResult<T> = Result<T, ApiError>;

async fn list_documents(State(s): State<AppState>) -> impl IntoResponse {
    Json(s.library.summaries())
}

async fn document_outline(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    let doc = s.library.document(&id).ok_or_else(|| not_found(format!("no document {id}")))?;
    Ok(Json(json!({ "id": doc.id, "title": doc.title, "outline": outline(doc) })))
}

async fn rules() -> impl IntoResponse {
    Json(rule_catalog())
}

#[derive(Debug, Deserialize, Serialize)]
pub struct ProveRequest {
    pub goal: FormulaRef,
    #[serde(default)]
    pub selection: BTreeSet<FormulaRef>,
    /// Same format as a prover config file; missing means defaults.
    #[serde(default)]
    pub config: Option<serde_json::Value>,
}

async fn submit(State(s): State<AppState>, Json(req): Json<ProveRequest>) -> ApiResult<impl IntoResponse> {
    let prepared = s.library.prepare(&req.goal, &req.selection).map_err(|e| match e {
        LibraryError::Unresolved(_) | LibraryError::Document(_) => not_found(e.to_string()),
        other => internal(other),
    })?;
    let config = match req.config {
        Some(value) => ProverConfig::from_value(value),
        None => Ok(ProverConfig::default()),
    }
    .map_err(|e| ApiError(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()))?;
    let task_id = s.tasks.submit(req.goal, prepared, config);
    Ok((StatusCode::ACCEPTED, Json(json!({ "task_id": task_id }))))
}

async fn task(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    s.tasks.get(&id).map(Json).ok_or_else(|| not_found(format!("no task {id}")))
}

async fn interrupt(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    match s.tasks.interrupt(&id) {
        Ok(task) => Ok((StatusCode::ACCEPTED, Json(task))),
        Err(e @ InterruptError::Unknown(_)) => Err(not_found(e.to_string())),
        Err(e @ InterruptError::Finished(_)) => Err(ApiError(StatusCode::CONFLICT, e.to_string())),
    }
}

fn load(s: &AppState, key: &str, version: &str) -> ApiResult<ProofRecord> {
    let missing = || not_found(format!("no proof {key}/{version}"));
    let version: u32 = version.parse().map_err(|_| missing())?;
    s.tasks.store().get(key, version).map_err(internal)?.ok_or_else(missing)
}

#[derive(Debug, Deserialize)]
struct ViewQuery {
    view: Option<String>,
}

async fn proof(
    State(s): State<AppState>,
    Path((key, version)): Path<(String, String)>,
    Query(q): Query<ViewQuery>,
) -> ApiResult<Response> {
    let record = load(&s, &key, &version)?;
    match q.view.as_deref().unwrap_or("json") {
        "json" => Ok(Json(record).into_response()),
        "tree" => Ok(Json(tree_to_view(&record.result.tree)).into_response()),
        "prose" => {
            let simple = simplify(&record.result.tree, SimplifyOptions::default())
                .map_err(|e| ApiError(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()))?;
            let prose = render_proof_nl(&simple, &record.kb).map_err(internal)?;
            Ok(Json(prose).into_response())
        }
        other => Err(ApiError(StatusCode::BAD_REQUEST, format!("unknown view \"{other}\"; expected tree, prose or json"))),
    }
}

async fn simplify_proof(
    State(s): State<AppState>,
    Path((key, version)): Path<(String, String)>,
    body: Option<Json<SimplifyOptions>>,
) -> ApiResult<impl IntoResponse> {
    let record = load(&s, &key, &version)?;
    let options = body.map_or_else(SimplifyOptions::default, |Json(o)| o);
    let simple = simplify(&record.result.tree, options).map_err(|e| ApiError(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()))?;
    let prose = render_proof_nl(&simple, &record.kb).ok();
    Ok(Json(ProofExport { tree: tree_to_view(&simple), prose }))
}
