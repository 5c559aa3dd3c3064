use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::body::Bytes;
use axum::extract::{FromRequest, Multipart, Request, State};
use axum::http::{header, StatusCode};
use axum::middleware::Next;
use axum::response::{IntoResponse, Response};
use axum::{Extension, Json};
use serde::Deserialize;

use super::response::{ApiBody, ErrorCode, Outcome, Timed};
use crate::credential::{verify_credentials, AccountRecord, PasswordString, Salt, UserId};
use crate::digest::{Digest, ObjectHasher};
use crate::store::{AccountStore, StoreError};

/// Longest accepted `user_id` form part, before validation.
const MAX_TEXT_PART: usize = 4 * 1024;

pub(crate) struct AppState {
    pub store: Arc<AccountStore>,
    pub max_upload_bytes: u64,
    pub artificial_delay: Duration,
    pub allow_text_signup: bool,
}

/// When the server started working on a request.
#[derive(Clone, Copy)]
pub(crate) struct RequestStart(Instant);

pub(crate) async fn stamp_start(mut req: Request, next: Next) -> Response {
    req.extensions_mut().insert(RequestStart(Instant::now()));
    next.run(req).await
}

impl RequestStart {
    fn finish(self, outcome: Outcome) -> Timed {
        Timed { outcome, auth_time_ms: self.0.elapsed().as_secs_f64() * 1000.0 }
    }
}

type Shared = State<Arc<AppState>>;

pub(crate) async fn health() -> Json<ApiBody> {
    Json(ApiBody::Ok { auth_time_ms: None })
}

pub(crate) async fn signup(
    State(state): Shared,
    Extension(start): Extension<RequestStart>,
    req: Request,
) -> Timed {
    let outcome = signup_inner(&state, req).await.unwrap_or_else(Outcome::Error);
    state.delay().await;
    start.finish(outcome)
}

async fn signup_inner(state: &Arc<AppState>, req: Request) -> Result<Outcome, ErrorCode> {
    let (user_id, password) = if is_json(&req) {
        if !state.allow_text_signup {
            return Err(ErrorCode::BadRequest);
        }
        let body = read_json_body(req).await?;
        let creds: HashLogin = serde_json::from_slice(&body).map_err(|_| ErrorCode::BadRequest)?;
        let user_id = UserId::new(creds.user_id).map_err(|_| ErrorCode::BadRequest)?;
        let password =
            PasswordString::from_submitted(&creds.password).map_err(|_| ErrorCode::BadRequest)?;
        (user_id, password)
    } else {
        let form = ObjectForm::read(req, state).await?;
        let (digest, len) = form.object.ok_or(ErrorCode::BadRequest)?;
        let user_id = form.user_id.ok_or(ErrorCode::BadRequest)?;
        if len == 0 {
            return Err(ErrorCode::EmptyObject);
        }
        (user_id, PasswordString::from_digest(&digest))
    };

    let record = AccountRecord::create(user_id, &password).map_err(|e| {
        tracing::error!("salt generation failed: {e}");
        ErrorCode::Internal
    })?;
    let store = state.store.clone();
    let created = tokio::task::spawn_blocking(move || store.create_account(record))
        .await
        .map_err(|_| ErrorCode::Internal)?;
    match created {
        Ok(()) => Ok(Outcome::Accepted),
        Err(StoreError::AlreadyExists(_)) => Err(ErrorCode::DuplicateUser),
        Err(e) => {
            tracing::error!("store write failed: {e}");
            Err(ErrorCode::Internal)
        }
    }
}

#[derive(Deserialize)]
struct HashLogin {
    user_id: String,
    password: String,
}

pub(crate) async fn login_hash(
    State(state): Shared,
    Extension(start): Extension<RequestStart>,
    req: Request,
) -> Timed {
    let outcome = async {
        let body = read_json_body(req).await?;
        let creds: HashLogin = serde_json::from_slice(&body).map_err(|_| ErrorCode::BadRequest)?;
        let user_id = UserId::new(creds.user_id).map_err(|_| ErrorCode::BadRequest)?;
        let password =
            PasswordString::from_submitted(&creds.password).map_err(|_| ErrorCode::BadRequest)?;
        Ok(state.check(&user_id, &password))
    }
    .await
    .unwrap_or_else(Outcome::Error);
    state.delay().await;
    start.finish(outcome)
}

pub(crate) async fn login_object(
    State(state): Shared,
    Extension(start): Extension<RequestStart>,
    req: Request,
) -> Timed {
    let outcome = async {
        let form = ObjectForm::read(req, &state).await?;
        let (digest, _) = form.object.ok_or(ErrorCode::BadRequest)?;
        let user_id = form.user_id.ok_or(ErrorCode::BadRequest)?;
        Ok(state.check(&user_id, &PasswordString::from_digest(&digest)))
    }
    .await
    .unwrap_or_else(Outcome::Error);
    state.delay().await;
    start.finish(outcome)
}

/// Stand-in record for unknown users, so that path still pays for one
/// derivation. This narrows the timing gap but does not close it.
static DECOY: std::sync::LazyLock<AccountRecord> = std::sync::LazyLock::new(|| AccountRecord {
    user_id: UserId::new("decoy").expect("valid id"),
    pwd_hash: Digest::from_bytes([0; 32]),
    salt: Salt::from_bytes([0; 16]),
});

impl AppState {
    fn check(&self, user_id: &UserId, password: &PasswordString) -> Outcome {
        match self.store.get_account(user_id) {
            Ok(record) if verify_credentials(password, &record) => Outcome::Accepted,
            Ok(_) => Outcome::Rejected,
            Err(_) => {
                let _ = verify_credentials(password, &DECOY);
                Outcome::Rejected
            }
        }
    }

    async fn delay(&self) {
        if !self.artificial_delay.is_zero() {
            tokio::time::sleep(self.artificial_delay).await;
        }
    }
}

fn is_json(req: &Request) -> bool {
    req.headers()
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|ct| ct.trim_start().to_ascii_lowercase().starts_with("application/json"))
}

async fn read_json_body(req: Request) -> Result<Bytes, ErrorCode> {
    Bytes::from_request(req, &()).await.map_err(|rejection| {
        if rejection.status() == StatusCode::PAYLOAD_TOO_LARGE {
            ErrorCode::TooLarge
        } else {
            ErrorCode::BadRequest
        }
    })
}

/// The `user_id` + `object` multipart form shared by sign-up and object login.
/// The object is digested as it streams in and never buffered whole.
struct ObjectForm {
    user_id: Option<UserId>,
    object: Option<(Digest, u64)>,
}

impl ObjectForm {
    async fn read(req: Request, state: &Arc<AppState>) -> Result<Self, ErrorCode> {
        let mut multipart = Multipart::from_request(req, state)
            .await
            .map_err(|_| ErrorCode::BadRequest)?;
        let mut form = ObjectForm { user_id: None, object: None };
        let mut too_large = false;

        while let Some(mut field) = multipart.next_field().await.map_err(multipart_error)? {
            match field.name() {
                Some("user_id") if form.user_id.is_none() => {
                    let mut raw = Vec::new();
                    while let Some(chunk) = field.chunk().await.map_err(multipart_error)? {
                        raw.extend_from_slice(&chunk);
                        if raw.len() > MAX_TEXT_PART {
                            return Err(ErrorCode::BadRequest);
                        }
                    }
                    let text = String::from_utf8(raw).map_err(|_| ErrorCode::BadRequest)?;
                    form.user_id = Some(UserId::new(text).map_err(|_| ErrorCode::BadRequest)?);
                }
                Some("object") if form.object.is_none() => {
                    let mut hasher = ObjectHasher::new();
                    while let Some(chunk) = field.chunk().await.map_err(multipart_error)? {
                        // keep draining so the client sees the 413 instead of a reset
                        if too_large {
                            continue;
                        }
                        hasher.update(&chunk);
                        if hasher.len() > state.max_upload_bytes {
                            too_large = true;
                        }
                    }
                    let len = hasher.len();
                    form.object = Some((hasher.finish(), len));
                }
                _ => while field.chunk().await.map_err(multipart_error)?.is_some() {},
            }
        }
        if too_large {
            return Err(ErrorCode::TooLarge);
        }
        Ok(form)
    }
}

fn multipart_error(e: axum::extract::multipart::MultipartError) -> ErrorCode {
    if e.status() == StatusCode::PAYLOAD_TOO_LARGE {
        ErrorCode::TooLarge
    } else {
        ErrorCode::BadRequest
    }
}

pub(crate) async fn not_found() -> impl IntoResponse {
    (StatusCode::NOT_FOUND, Json(ApiBody::Error { code: ErrorCode::BadRequest }))
}
