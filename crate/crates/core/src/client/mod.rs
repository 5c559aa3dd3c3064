//! HTTP client for the login service.

pub mod throttle;

use std::io;
use std::num::NonZeroU64;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use bytes::Bytes;
use futures::Stream;
use reqwest::multipart::{Form, Part};
use reqwest::{Body, StatusCode};
use serde::Serialize;
use thiserror::Error;

use crate::server::{ApiBody, ErrorCode, AUTH_TIME_HEADER};

pub const DEFAULT_SERVER: &str = "http://127.0.0.1:8080";

const UPLOAD_CHUNK: usize = 64 * 1024;

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("invalid client configuration: {0}")]
    Config(String),
    #[error("request failed: {0}")]
    Transport(#[from] reqwest::Error),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("server returned {status}{}", code.map(|c| format!(" ({})", c.as_str())).unwrap_or_default())]
    Server { status: u16, code: Option<ErrorCode> },
}

impl ClientError {
    pub fn is_transport(&self) -> bool {
        matches!(self, ClientError::Transport(_))
    }
}

#[derive(Clone, Debug)]
pub struct ClientConfig {
    pub base_url: String,
    pub timeout: Duration,
    /// Upload pacing for object bodies, in bytes per second.
    pub throttle_bps: Option<NonZeroU64>,
}

impl ClientConfig {
    pub fn new(base_url: impl Into<String>) -> Self {
        ClientConfig {
            base_url: base_url.into(),
            timeout: Duration::from_secs(300),
            throttle_bps: None,
        }
    }

    pub fn with_throttle(mut self, bps: Option<NonZeroU64>) -> Self {
        self.throttle_bps = bps;
        self
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }
}

/// Where an object's bytes come from.
#[derive(Clone, Debug)]
pub enum ObjectSource {
    Memory(Bytes),
    File(PathBuf),
}

impl From<Bytes> for ObjectSource {
    fn from(b: Bytes) -> Self {
        ObjectSource::Memory(b)
    }
}

impl From<Vec<u8>> for ObjectSource {
    fn from(v: Vec<u8>) -> Self {
        ObjectSource::Memory(Bytes::from(v))
    }
}

impl From<&Path> for ObjectSource {
    fn from(p: &Path) -> Self {
        ObjectSource::File(p.to_path_buf())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accepted,
    Rejected,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Accepted => "accepted",
            Verdict::Rejected => "rejected",
        }
    }
}

#[derive(Clone, Debug)]
pub struct AuthOutcome {
    pub verdict: Verdict,
    /// `X-Auth-Time-Ms` as reported by the server.
    pub server_auth_ms: Option<f64>,
    /// Client-side time from just before sending to the end of the response body.
    pub wall_ms: f64,
}

#[derive(Clone)]
pub struct Client {
    http: reqwest::Client,
    config: ClientConfig,
}

#[derive(Serialize)]
struct Credentials<'a> {
    user_id: &'a str,
    password: &'a str,
}

impl Client {
    pub fn new(config: ClientConfig) -> Result<Self, ClientError> {
        if config.timeout.is_zero() {
            return Err(ClientError::Config("timeout must be positive".into()));
        }
        reqwest::Url::parse(&config.base_url)
            .map_err(|e| ClientError::Config(format!("bad server url {:?}: {e}", config.base_url)))?;
        let http = reqwest::Client::builder().timeout(config.timeout).build()?;
        Ok(Client { http, config })
    }

    pub fn config(&self) -> &ClientConfig {
        &self.config
    }

    fn url(&self, path: &str) -> String {
        format!("{}{path}", self.config.base_url.trim_end_matches('/'))
    }

    pub async fn health(&self) -> Result<(), ClientError> {
        let resp = self.http.get(self.url("/api/health")).send().await?;
        if resp.status().is_success() {
            Ok(())
        } else {
            Err(ClientError::Server { status: resp.status().as_u16(), code: None })
        }
    }

    /// Creates an account whose password is the given object.
    pub async fn signup(&self, user_id: &str, object: impl Into<ObjectSource>) -> Result<AuthOutcome, ClientError> {
        let form = self.object_form(user_id, object.into()).await?;
        let req = self.http.post(self.url("/api/signup")).multipart(form);
        self.send(req, false).await
    }

    /// Creates an account with a text password. The server must run with text
    /// sign-up enabled.
    pub async fn signup_text(&self, user_id: &str, password: &str) -> Result<AuthOutcome, ClientError> {
        let req = self.http.post(self.url("/api/signup")).json(&Credentials { user_id, password });
        self.send(req, false).await
    }

    /// Logs in with a password string: a text password or an object's hex digest.
    pub async fn login_hash(&self, user_id: &str, password: &str) -> Result<AuthOutcome, ClientError> {
        let req = self.http.post(self.url("/api/login/hash")).json(&Credentials { user_id, password });
        self.send(req, true).await
    }

    /// Logs in by uploading the object itself.
    pub async fn login_object(
        &self,
        user_id: &str,
        object: impl Into<ObjectSource>,
    ) -> Result<AuthOutcome, ClientError> {
        let form = self.object_form(user_id, object.into()).await?;
        let req = self.http.post(self.url("/api/login/object")).multipart(form);
        self.send(req, true).await
    }

    async fn object_form(&self, user_id: &str, object: ObjectSource) -> Result<Form, ClientError> {
        let part = match object {
            ObjectSource::Memory(data) => {
                let len = data.len() as u64;
                self.part(throttle::chunked(data, UPLOAD_CHUNK), len)
            }
            ObjectSource::File(path) => {
                let file = tokio::fs::File::open(&path).await?;
                let len = file.metadata().await?.len();
                let stream = tokio_util::io::ReaderStream::with_capacity(file, UPLOAD_CHUNK);
                self.part(stream, len)
            }
        };
        let part = part.file_name("object").mime_str("application/octet-stream")?;
        Ok(Form::new().text("user_id", user_id.to_owned()).part("object", part))
    }

    fn part<S>(&self, stream: S, len: u64) -> Part
    where
        S: Stream<Item = io::Result<Bytes>> + Send + Sync + Unpin + 'static,
    {
        let body = match self.config.throttle_bps {
            Some(bps) => Body::wrap_stream(throttle::throttle(stream, bps)),
            None => Body::wrap_stream(stream),
        };
        Part::stream_with_length(body, len)
    }

    async fn send(&self, req: reqwest::RequestBuilder, login: bool) -> Result<AuthOutcome, ClientError> {
        let started = Instant::now();
        let resp = req.send().await?;
        let status = resp.status();
        let server_auth_ms = resp
            .headers()
            .get(AUTH_TIME_HEADER)
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.parse::<f64>().ok());
        let body = resp.bytes().await?;
        let wall_ms = started.elapsed().as_secs_f64() * 1000.0;

        let verdict = match status {
            StatusCode::OK => Verdict::Accepted,
            StatusCode::UNAUTHORIZED if login => Verdict::Rejected,
            other => {
                let code = match serde_json::from_slice::<ApiBody>(&body) {
                    Ok(ApiBody::Error { code }) => Some(code),
                    _ => None,
                };
                return Err(ClientError::Server { status: other.as_u16(), code });
            }
        };
        Ok(AuthOutcome { verdict, server_auth_ms, wall_ms })
    }
}
