use axum::http::{HeaderName, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::{Deserialize, Serialize};

/// Server-measured authentication time, on every auth endpoint response.
pub const AUTH_TIME_HEADER: &str = "x-auth-time-ms";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    DuplicateUser,
    EmptyObject,
    TooLarge,
    BadRequest,
    Internal,
}

impl ErrorCode {
    pub fn status(self) -> StatusCode {
        match self {
            ErrorCode::DuplicateUser => StatusCode::CONFLICT,
            ErrorCode::EmptyObject => StatusCode::UNPROCESSABLE_ENTITY,
            ErrorCode::TooLarge => StatusCode::PAYLOAD_TOO_LARGE,
            ErrorCode::BadRequest => StatusCode::BAD_REQUEST,
            ErrorCode::Internal => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::DuplicateUser => "duplicate_user",
            ErrorCode::EmptyObject => "empty_object",
            ErrorCode::TooLarge => "too_large",
            ErrorCode::BadRequest => "bad_request",
            ErrorCode::Internal => "internal",
        }
    }
}

/// JSON bodies produced by the API.
///
/// A rejected login carries only its status. Its timing goes in the header, so
/// the body of every 401 is the same byte string whatever the reason.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ApiBody {
    Ok {
        #[serde(skip_serializing_if = "Option::is_none", default)]
        auth_time_ms: Option<f64>,
    },
    Rejected,
    Error { code: ErrorCode },
}

/// Outcome of an auth endpoint plus the elapsed time to report.
#[derive(Debug)]
pub(crate) struct Timed {
    pub outcome: Outcome,
    pub auth_time_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Outcome {
    Accepted,
    Rejected,
    Error(ErrorCode),
}

impl IntoResponse for Timed {
    fn into_response(self) -> Response {
        let (status, body) = match self.outcome {
            Outcome::Accepted => {
                (StatusCode::OK, ApiBody::Ok { auth_time_ms: Some(self.auth_time_ms) })
            }
            Outcome::Rejected => (StatusCode::UNAUTHORIZED, ApiBody::Rejected),
            Outcome::Error(code) => (code.status(), ApiBody::Error { code }),
        };
        let mut resp = (status, Json(body)).into_response();
        if let Ok(v) = HeaderValue::from_str(&format_ms(self.auth_time_ms)) {
            resp.headers_mut().insert(HeaderName::from_static(AUTH_TIME_HEADER), v);
        }
        resp
    }
}

fn format_ms(ms: f64) -> String {
    format!("{ms:.3}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn body_shapes() {
        let ok = serde_json::to_string(&ApiBody::Ok { auth_time_ms: Some(1.5) }).unwrap();
        assert_eq!(ok, r#"{"status":"ok","auth_time_ms":1.5}"#);
        assert_eq!(serde_json::to_string(&ApiBody::Ok { auth_time_ms: None }).unwrap(), r#"{"status":"ok"}"#);
        assert_eq!(serde_json::to_string(&ApiBody::Rejected).unwrap(), r#"{"status":"rejected"}"#);
        let err = serde_json::to_string(&ApiBody::Error { code: ErrorCode::TooLarge }).unwrap();
        assert_eq!(err, r#"{"status":"error","code":"too_large"}"#);
    }

    #[test]
    fn codes_map_to_statuses() {
        assert_eq!(ErrorCode::DuplicateUser.status(), StatusCode::CONFLICT);
        assert_eq!(ErrorCode::EmptyObject.status(), StatusCode::UNPROCESSABLE_ENTITY);
        assert_eq!(ErrorCode::TooLarge.status(), StatusCode::PAYLOAD_TOO_LARGE);
        assert_eq!(ErrorCode::BadRequest.status(), StatusCode::BAD_REQUEST);
        for code in [ErrorCode::DuplicateUser, ErrorCode::EmptyObject, ErrorCode::TooLarge, ErrorCode::BadRequest] {
            let json = serde_json::to_string(&code).unwrap();
            assert_eq!(json, format!("\"{}\"", code.as_str()));
        }
    }
}
