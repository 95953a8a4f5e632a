//! JSON-over-HTTP front for [`SessionService`].
//!
//! | method | path                            | body / reply                          |
//! |--------|---------------------------------|---------------------------------------|
//! | POST   | `/sessions`                     | `CreateSessionRequest` → `SessionHandle` |
//! | GET    | `/sessions/{id}`                | `SessionHandle`                       |
//! | POST   | `/sessions/{id}/start`          | → `SnapshotPayload`                   |
//! | GET    | `/sessions/{id}/snapshot`       | → `SnapshotPayload`                   |
//! | POST   | `/sessions/{id}/interactions`   | `InteractionRequest` → `Ack`          |
//! | GET    | `/sessions/{id}/archive`        | → `[ArchivePayload]`                  |
//! | GET    | `/sessions/{id}/log?format=csv` | NDJSON (default) or CSV text          |
//!
//! Errors carry `{"error": "..."}` with 404 for unknown sessions, 409 for
//! interactions that are not awaited and 422 for invalid input.

use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;

use crate::service::{CreateSessionRequest, InteractionRequest, LogFormat, ServiceError, SessionService};

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = match &self {
            ServiceError::UnknownSession(_) => StatusCode::NOT_FOUND,
            ServiceError::NotAwaiting => StatusCode::CONFLICT,
            ServiceError::Log(_) => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        (status, Json(serde_json::json!({ "error": self.to_string() }))).into_response()
    }
}

type Shared = Arc<SessionService>;

async fn blocking<T, F>(service: Shared, f: F) -> Result<T, ServiceError>
where
    T: Send + 'static,
    F: FnOnce(&SessionService) -> Result<T, ServiceError> + Send + 'static,
{
    tokio::task::spawn_blocking(move || f(&service)).await.expect("service task panicked")
}

async fn create(State(service): State<Shared>, Json(request): Json<CreateSessionRequest>) -> Response {
    match blocking(service, move |s| s.create_session(request)).await {
        Ok(handle) => (StatusCode::CREATED, Json(handle)).into_response(),
        Err(e) => e.into_response(),
    }
}

async fn handle(State(service): State<Shared>, Path(id): Path<String>) -> Response {
    blocking(service, move |s| s.handle(&id)).await.map(Json).into_response()
}

async fn start(State(service): State<Shared>, Path(id): Path<String>) -> Response {
    blocking(service, move |s| s.start(&id)).await.map(Json).into_response()
}

async fn snapshot(State(service): State<Shared>, Path(id): Path<String>) -> Response {
    blocking(service, move |s| s.get_snapshot(&id)).await.map(Json).into_response()
}

async fn interact(
    State(service): State<Shared>,
    Path(id): Path<String>,
    Json(request): Json<InteractionRequest>,
) -> Response {
    blocking(service, move |s| s.submit_interaction(&id, request)).await.map(Json).into_response()
}

async fn archive(State(service): State<Shared>, Path(id): Path<String>) -> Response {
    blocking(service, move |s| s.list_archive(&id)).await.map(Json).into_response()
}

#[derive(Deserialize)]
struct LogQuery {
    format: Option<LogFormat>,
}

async fn export_log(State(service): State<Shared>, Path(id): Path<String>, Query(q): Query<LogQuery>) -> Response {
    let format = q.format.unwrap_or(LogFormat::Ndjson);
    let content_type = match format {
        LogFormat::Ndjson => "application/x-ndjson",
        LogFormat::Csv => "text/csv",
    };
    match blocking(service, move |s| s.export_log(&id, format)).await {
        Ok(text) => ([(header::CONTENT_TYPE, content_type)], text).into_response(),
        Err(e) => e.into_response(),
    }
}

pub fn router(service: Arc<SessionService>) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(handle))
        .route("/sessions/{id}/start", post(start))
        .route("/sessions/{id}/snapshot", get(snapshot))
        .route("/sessions/{id}/interactions", post(interact))
        .route("/sessions/{id}/archive", get(archive))
        .route("/sessions/{id}/log", get(export_log))
        .with_state(service)
}

/// Serves the API until the process is stopped.
pub async fn serve(addr: &str) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(Arc::new(SessionService::new()))).await
}
