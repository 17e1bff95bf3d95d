//! HTTP/JSON service over the recommender and the annotation store.
//!
//! All routes live under `/v1`. Session-scoped routes (`task`, `decision`,
//! `annotation`, `search`) expect `Authorization: Bearer <token>` with a
//! token from `POST /v1/session`.

mod api;
mod error;
mod state;

use std::future::Future;
use std::sync::Arc;

pub use api::router;
pub use error::ApiError;
pub use state::{AppState, ServiceConfig, ServiceFiles, Stores, ANNOTATIONS_FILE, FEEDBACK_FILE};

/// Serves until `shutdown` resolves.
pub async fn serve(
    listener: tokio::net::TcpListener,
    state: Arc<AppState>,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(state)).with_graceful_shutdown(shutdown).await
}
