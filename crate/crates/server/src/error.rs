use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use serde::Serialize;

/// Error body: `{"error": {"code", "parameter"?, "message"}}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub parameter: Option<String>,
    pub message: String,
}

#[derive(Serialize)]
struct Body<'a> {
    error: Detail<'a>,
}

#[derive(Serialize)]
struct Detail<'a> {
    code: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    parameter: Option<&'a str>,
    message: &'a str,
}

impl ApiError {
    fn new(
        status: StatusCode,
        code: &'static str,
        parameter: Option<&str>,
        message: impl Into<String>,
    ) -> Self {
        ApiError {
            status,
            code,
            parameter: parameter.map(str::to_string),
            message: message.into(),
        }
    }

    pub fn invalid(parameter: &str, message: impl Into<String>) -> Self {
        Self::new(
            StatusCode::BAD_REQUEST,
            "invalid_parameter",
            Some(parameter),
            message,
        )
    }

    pub fn missing(parameter: &str) -> Self {
        Self::new(
            StatusCode::BAD_REQUEST,
            "missing_parameter",
            Some(parameter),
            format!("parameter {parameter} is required"),
        )
    }

    pub fn unknown_parameter(parameter: &str) -> Self {
        Self::new(
            StatusCode::BAD_REQUEST,
            "unknown_parameter",
            Some(parameter),
            format!("unknown parameter {parameter}"),
        )
    }

    pub fn unknown_theme(id: &str) -> Self {
        Self::new(
            StatusCode::NOT_FOUND,
            "unknown_theme",
            Some("id"),
            format!("no theme with id {id}"),
        )
    }

    pub fn not_loaded() -> Self {
        Self::new(
            StatusCode::SERVICE_UNAVAILABLE,
            "not_loaded",
            None,
            "no corpus is loaded",
        )
    }

    /// Valid request that the data cannot answer, e.g. no full texts.
    pub fn unprocessable(message: impl Into<String>) -> Self {
        Self::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            "unprocessable",
            None,
            message,
        )
    }

    pub fn forbidden(message: impl Into<String>) -> Self {
        Self::new(StatusCode::FORBIDDEN, "forbidden", None, message)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", None, message)
    }

    pub fn body(&self) -> Vec<u8> {
        let body = Body {
            error: Detail {
                code: self.code,
                parameter: self.parameter.as_deref(),
                message: &self.message,
            },
        };
        serde_json::to_vec(&body).expect("error body serializes")
    }
}

impl std::fmt::Display for ApiError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.parameter {
            Some(p) => write!(f, "{} ({p}): {}", self.code, self.message),
            None => write!(f, "{}: {}", self.code, self.message),
        }
    }
}

impl std::error::Error for ApiError {}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        crate::service::json_response(self.status, self.body())
    }
}
