use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::Serialize;
use tabula::SourceSpan;

use crate::session::{Action, CreateSession, SessionError};
use crate::store::Store;

/// Error body: `{code, message, span?}`.
#[derive(Debug, Serialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub span: Option<SourceSpan>,
}

pub struct ApiError(SessionError);

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        ApiError(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.0.status()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        let body = ErrorBody {
            code: self.0.code().into(),
            message: self.0.to_string(),
            span: self.0.span(),
        };
        (status, Json(body)).into_response()
    }
}

fn bad_request(message: String) -> Response {
    let body = ErrorBody {
        code: "bad_request".into(),
        message,
        span: None,
    };
    (StatusCode::BAD_REQUEST, Json(body)).into_response()
}

fn decode<T: DeserializeOwned>(body: &Bytes) -> Result<T, Response> {
    serde_json::from_slice(body).map_err(|e| bad_request(e.to_string()))
}

/// Runs a store call off the async workers; finalizing can take a while.
async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, SessionError> + Send + 'static,
) -> Result<T, ApiError> {
    match tokio::task::spawn_blocking(f).await {
        Ok(result) => result.map_err(ApiError),
        Err(e) => Err(ApiError(SessionError::Io(e.to_string()))),
    }
}

async fn create(State(store): State<Arc<Store>>, body: Bytes) -> Response {
    let body: CreateSession = match decode(&body) {
        Ok(b) => b,
        Err(r) => return r,
    };
    match blocking(move || store.create(&body)).await {
        Ok(view) => (StatusCode::CREATED, Json(view)).into_response(),
        Err(e) => e.into_response(),
    }
}

async fn state(State(store): State<Arc<Store>>, Path(id): Path<String>) -> Response {
    match store.view(&id) {
        Ok(view) => Json(view).into_response(),
        Err(e) => ApiError(e).into_response(),
    }
}

async fn act(State(store): State<Arc<Store>>, Path(id): Path<String>, body: Bytes) -> Response {
    let action: Action = match decode(&body) {
        Ok(a) => a,
        Err(r) => return r,
    };
    match blocking(move || store.act(&id, &action)).await {
        Ok(view) => Json(view).into_response(),
        Err(e) => e.into_response(),
    }
}

async fn remove(State(store): State<Arc<Store>>, Path(id): Path<String>) -> Response {
    match store.delete(&id) {
        Ok(()) => StatusCode::NO_CONTENT.into_response(),
        Err(e) => ApiError(e).into_response(),
    }
}

pub fn router(store: Arc<Store>) -> Router {
    Router::new()
        .route("/session", post(create))
        .route("/session/{id}", get(state).delete(remove))
        .route("/session/{id}/act", post(act))
        .with_state(store)
}

/// Serves until the process is stopped.
pub async fn serve(store: Arc<Store>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(store)).await
}
