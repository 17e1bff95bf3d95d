use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use taxotrace_core::analysis::AnalysisError;
use taxotrace_core::annotation::AnnotationError;
use taxotrace_core::recommender::HistoryError;
use taxotrace_core::taxonomy::TaxonomyError;
use taxotrace_core::wire::ErrorBody;

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub kind: &'static str,
    pub message: String,
}

impl ApiError {
    pub fn new(status: StatusCode, kind: &'static str, message: impl Into<String>) -> Self {
        Self { status, kind, message: message.into() }
    }

    pub fn unauthorized() -> Self {
        Self::new(StatusCode::UNAUTHORIZED, "unauthorized", "missing or unknown session token")
    }

    pub fn conflict(kind: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::CONFLICT, kind, message)
    }

    pub fn invalid(kind: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, kind, message)
    }

    fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        if self.status.is_server_error() {
            tracing::error!(kind = self.kind, "{}", self.message);
        }
        (self.status, Json(ErrorBody { error: self.kind.to_string(), message: self.message })).into_response()
    }
}

impl From<AnnotationError> for ApiError {
    fn from(e: AnnotationError) -> Self {
        match e {
            AnnotationError::Persistence(_) | AnnotationError::Io(_) | AnnotationError::Csv(_) => {
                Self::internal(e.to_string())
            }
            AnnotationError::AlreadyCompleted { .. } | AnnotationError::TreatmentMismatch { .. } => {
                Self::conflict("annotation_conflict", e.to_string())
            }
            _ => Self::invalid("invalid_record", e.to_string()),
        }
    }
}

impl From<HistoryError> for ApiError {
    fn from(e: HistoryError) -> Self {
        Self::internal(e.to_string())
    }
}

impl From<AnalysisError> for ApiError {
    fn from(e: AnalysisError) -> Self {
        let kind = match e {
            AnalysisError::EmptyDataset => "empty_dataset",
            _ => "analysis",
        };
        Self::invalid(kind, e.to_string())
    }
}

impl From<TaxonomyError> for ApiError {
    fn from(e: TaxonomyError) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_query", e.to_string())
    }
}
