use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::{structured, ServiceError};

/// Error envelope shared by the HTTP API and the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, thiserror::Error)]
#[error("{code}: {message}")]
pub struct ApiError {
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
}

impl ApiError {
    pub fn new(code: &str, message: impl Into<String>) -> Self {
        Self { code: code.to_owned(), message: message.into(), detail: None }
    }

    pub fn invalid_input(message: impl Into<String>) -> Self {
        Self::new("invalid_input", message)
    }

    pub fn status(&self) -> StatusCode {
        match self.code.as_str() {
            "unknown_document" | "unknown_pack" | "unknown_entity" | "unknown_graph" | "not_found" | "no_route" => {
                StatusCode::NOT_FOUND
            }
            "structural_violation" | "missing_justification" | "missing_curator" | "missing_silence_entry" => {
                StatusCode::UNPROCESSABLE_ENTITY
            }
            "illegal_transition"
            | "duplicate_version_conflict"
            | "pack_not_accepted"
            | "duplicate_link"
            | "identifier_conflict"
            | "unaccepted_pack"
            | "skipped_stage"
            | "backward_promotion"
            | "document_not_cleaned"
            | "idempotency_key_reused" => StatusCode::CONFLICT,
            "io_error" | "reader_failure" | "internal" => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::BAD_REQUEST,
        }
    }
}

impl From<plp_core::Error> for ApiError {
    fn from(e: plp_core::Error) -> Self {
        Self { code: e.code().to_owned(), message: e.to_string(), detail: e.detail() }
    }
}

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        match e {
            ServiceError::Core(e) => e.into(),
            ServiceError::ConfigInvalid(_) => Self::new("config_invalid", e.to_string()),
            ServiceError::AddressInUse(addr) => {
                Self { detail: Some(serde_json::json!({ "addr": addr.to_string() })), ..Self::new("address_in_use", e.to_string()) }
            }
            ServiceError::Io(_) => Self::new("io_error", e.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status(), [(header::CONTENT_TYPE, "application/json")], structured(&self)).into_response()
    }
}
