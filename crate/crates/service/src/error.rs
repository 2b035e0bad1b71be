use axum::extract::rejection::JsonRejection;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;
use wisard_core::{ImageError, WisardError};

/// Error response: an HTTP status plus a `{code, message}` body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    code: &'a str,
    message: &'a str,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "BAD_REQUEST", message)
    }

    pub fn model_not_found(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "MODEL_NOT_FOUND", format!("no model with id {id:?}"))
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "IO_ERROR", message)
    }
}

impl std::fmt::Display for ApiError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {}: {}", self.status.as_u16(), self.code, self.message)
    }
}

impl std::error::Error for ApiError {}

impl From<WisardError> for ApiError {
    fn from(e: WisardError) -> Self {
        let status = match &e {
            WisardError::TupleSizeOutOfRange(_)
            | WisardError::EmptyRetina
            | WisardError::InvalidMapping(_)
            | WisardError::EmptyLabel
            | WisardError::InvalidBleach
            | WisardError::IndexOutOfBounds { .. } => StatusCode::BAD_REQUEST,
            WisardError::UnknownLabel(_) => StatusCode::NOT_FOUND,
            WisardError::BitCountMismatch { .. }
            | WisardError::NonBinaryBit { .. }
            | WisardError::InvalidPattern(_)
            | WisardError::DimensionMismatch { .. }
            | WisardError::VersionMismatch { .. }
            | WisardError::Malformed(_)
            | WisardError::InvariantViolation(_) => StatusCode::UNPROCESSABLE_ENTITY,
        };
        Self::new(status, e.code(), e.to_string())
    }
}

impl From<ImageError> for ApiError {
    fn from(e: ImageError) -> Self {
        let status = match e {
            ImageError::Io { .. } => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        Self::new(status, e.code(), e.to_string())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        Self::bad_request(e.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            code: self.code,
            message: &self.message,
        };
        (self.status, Json(body)).into_response()
    }
}
