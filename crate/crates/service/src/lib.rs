//! HTTP interface for interactive editing sessions.
//!
//! Endpoints:
//! - `POST /sessions` with a document body creates a session.
//! - `GET /sessions/{id}/state?what=garment|pattern|all[&revision=n]`
//! - `POST /sessions/{id}/ops` with `{op, mirror[, revision]}`
//! - `POST /sessions/{id}/undo`
//! - `PUT /sessions/{id}/layout` with `{offsets: [[x, y], ...]}`
//! - `GET /healthz`

pub mod session;

use std::collections::HashMap;
use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::Json;
use serde::Deserialize;
use serde_json::{json, Value};
use tokio::sync::{Mutex, RwLock};

use tailor_core::edit::EditOp;
use tailor_core::io::load_document;
use tailor_core::GarmentDocument;

pub use axum::Router;
pub use session::{ApiError, Session};

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self)).into_response()
    }
}

type Shared = Arc<RwLock<Session>>;

#[derive(Clone, Default)]
pub struct AppState {
    sessions: Arc<Mutex<HashMap<String, Shared>>>,
}

impl AppState {
    /// Registers a session for `doc` and returns its id.
    pub async fn insert(&self, doc: GarmentDocument) -> String {
        let id = uuid::Uuid::new_v4().simple().to_string();
        self.sessions
            .lock()
            .await
            .insert(id.clone(), Arc::new(RwLock::new(Session::new(doc))));
        id
    }

    async fn get(&self, id: &str) -> Result<Shared, ApiError> {
        self.sessions
            .lock()
            .await
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::new(404, "SessionNotFound", format!("session {id}"), "no such session"))
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/healthz", get(healthz))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/state", get(get_state))
        .route("/sessions/{id}/ops", post(post_op))
        .route("/sessions/{id}/undo", post(post_undo))
        .route("/sessions/{id}/layout", put(put_layout))
        .with_state(state)
}

async fn healthz() -> Json<Value> {
    Json(json!({"status": "ok"}))
}

async fn create_session(State(state): State<AppState>, body: String) -> Result<(StatusCode, Json<Value>), ApiError> {
    let doc = load_document(&body).map_err(|e| ApiError::from_document(&e))?;
    let id = state.insert(doc).await;
    let session = state.get(&id).await?;
    let mut summary = session.read().await.summary();
    summary["id"] = json!(id);
    Ok((StatusCode::CREATED, Json(summary)))
}

#[derive(Debug, Deserialize)]
struct StateQuery {
    #[serde(default = "default_what")]
    what: String,
    revision: Option<u64>,
}

fn default_what() -> String {
    "all".into()
}

async fn get_state(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<StateQuery>,
) -> Result<Json<Value>, ApiError> {
    let session = state.get(&id).await?;
    let s = session.read().await;
    s.check_revision(q.revision)?;
    Ok(Json(s.state(&q.what)?))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OpRequest {
    op: EditOp,
    #[serde(default)]
    mirror: bool,
    #[serde(default)]
    revision: Option<u64>,
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &str) -> Result<T, ApiError> {
    serde_json::from_str(body).map_err(|e| {
        let (offset, _, _) = tailor_core::io::format::parse_error_position(body, &e);
        ApiError::new(400, "ParseError", format!("byte {offset}"), e.to_string())
    })
}

async fn post_op(State(state): State<AppState>, Path(id): Path<String>, body: String) -> Result<Json<Value>, ApiError> {
    let session = state.get(&id).await?;
    let req: OpRequest = parse_body(&body)?;
    let mut s = session.write().await;
    s.check_revision(req.revision)?;
    Ok(Json(s.apply(req.op, req.mirror)?))
}

async fn post_undo(State(state): State<AppState>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let session = state.get(&id).await?;
    let mut s = session.write().await;
    Ok(Json(s.undo()?))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayoutRequest {
    offsets: Vec<[f64; 2]>,
}

async fn put_layout(State(state): State<AppState>, Path(id): Path<String>, body: String) -> Result<Json<Value>, ApiError> {
    let session = state.get(&id).await?;
    let req: LayoutRequest = parse_body(&body)?;
    let mut s = session.write().await;
    s.set_layout(&req.offsets)?;
    Ok(Json(json!({"revision": s.revision, "layout": s.layout_json()})))
}

/// Serves `app` on `listener` until `shutdown` resolves.
pub async fn serve_router(
    listener: tokio::net::TcpListener,
    app: Router,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, app).with_graceful_shutdown(shutdown).await
}
