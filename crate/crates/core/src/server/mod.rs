//! HTTP login service.
//!
//! | route                    | body                                   |
//! |--------------------------|----------------------------------------|
//! | `POST /api/signup`       | multipart: `user_id`, `object`         |
//! | `POST /api/login/hash`   | JSON: `{"user_id":…,"password":…}`     |
//! | `POST /api/login/object` | multipart: `user_id`, `object`         |
//! | `GET /api/health`        |                                        |
//!
//! Every auth response carries `X-Auth-Time-Ms`, the time from the start of
//! request processing to the verdict. Uploaded objects are digested while they
//! stream in; the server never holds a whole object in memory.

mod api;
pub mod response;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use axum::extract::DefaultBodyLimit;
use axum::routing::{get, post};
use axum::{middleware, Router};
use thiserror::Error;
use tokio::sync::oneshot;
use tokio::task::JoinHandle;
use tower_http::services::ServeDir;

use crate::store::{AccountStore, StoreError};

pub use response::{ApiBody, ErrorCode, AUTH_TIME_HEADER};

pub const DEFAULT_MAX_UPLOAD_BYTES: u64 = 64 * 1024 * 1024;

/// Room for multipart boundaries and the `user_id` part on top of the object cap.
const FORM_OVERHEAD_BYTES: u64 = 64 * 1024;

/// Cap on JSON request bodies.
const MAX_JSON_BODY: usize = 64 * 1024;

#[derive(Debug, Error)]
pub enum ServerError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("failed to bind {addr}: {source}")]
    Bind { addr: SocketAddr, source: std::io::Error },
    #[error("server i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug)]
pub struct ServerConfig {
    pub listen: SocketAddr,
    pub store_path: PathBuf,
    pub max_upload_bytes: u64,
    /// Added to every auth request inside the timed region.
    pub artificial_delay: Duration,
    /// Accept `application/json` sign-ups with a text password.
    pub allow_text_signup: bool,
    /// Serve static files (the browser client) at `/`.
    pub static_dir: Option<PathBuf>,
}

impl ServerConfig {
    pub fn new(listen: SocketAddr, store_path: impl Into<PathBuf>) -> Self {
        ServerConfig {
            listen,
            store_path: store_path.into(),
            max_upload_bytes: DEFAULT_MAX_UPLOAD_BYTES,
            artificial_delay: Duration::ZERO,
            allow_text_signup: false,
            static_dir: None,
        }
    }

    pub fn validate(&self) -> Result<(), ServerError> {
        if self.max_upload_bytes == 0 {
            return Err(ServerError::Config("max upload bytes must be at least 1".into()));
        }
        Ok(())
    }
}

/// Builds the router over an already-open store.
pub fn router(config: &ServerConfig, store: Arc<AccountStore>) -> Router {
    let state = Arc::new(api::AppState {
        store,
        max_upload_bytes: config.max_upload_bytes,
        artificial_delay: config.artificial_delay,
        allow_text_signup: config.allow_text_signup,
    });
    let form_limit = usize::try_from(config.max_upload_bytes.saturating_add(FORM_OVERHEAD_BYTES))
        .unwrap_or(usize::MAX);

    let auth = Router::new()
        .route("/api/signup", post(api::signup).layer(DefaultBodyLimit::max(form_limit)))
        .route(
            "/api/login/object",
            post(api::login_object).layer(DefaultBodyLimit::max(form_limit)),
        )
        .route("/api/login/hash", post(api::login_hash).layer(DefaultBodyLimit::max(MAX_JSON_BODY)))
        .route_layer(middleware::from_fn(api::stamp_start));

    let app = Router::new()
        .route("/api/health", get(api::health))
        .merge(auth)
        .with_state(state);

    match &config.static_dir {
        Some(dir) => app.fallback_service(ServeDir::new(dir)),
        None => app.fallback(api::not_found),
    }
}

/// A server running on a background task.
pub struct RunningServer {
    addr: SocketAddr,
    store: Arc<AccountStore>,
    shutdown: Option<oneshot::Sender<()>>,
    task: JoinHandle<std::io::Result<()>>,
}

impl RunningServer {
    pub fn local_addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn base_url(&self) -> String {
        format!("http://{}", self.addr)
    }

    pub fn store(&self) -> &Arc<AccountStore> {
        &self.store
    }

    /// Stops accepting connections and waits for in-flight requests.
    pub async fn shutdown(mut self) -> Result<(), ServerError> {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        match (&mut self.task).await {
            Ok(res) => res.map_err(ServerError::Io),
            Err(e) => Err(ServerError::Io(std::io::Error::other(e))),
        }
    }
}

/// Opens the store, binds, and serves on a spawned task. Binding to port 0
/// picks a free port; see [`RunningServer::local_addr`].
pub async fn start(config: ServerConfig) -> Result<RunningServer, ServerError> {
    config.validate()?;
    let path = config.store_path.clone();
    let store = tokio::task::spawn_blocking(move || AccountStore::open(path))
        .await
        .map_err(std::io::Error::other)??;
    let store = Arc::new(store);

    let listener = tokio::net::TcpListener::bind(config.listen)
        .await
        .map_err(|source| ServerError::Bind { addr: config.listen, source })?;
    let addr = listener.local_addr()?;
    let app = router(&config, store.clone());

    let (tx, rx) = oneshot::channel::<()>();
    let task = tokio::spawn(async move {
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = rx.await;
            })
            .await
    });
    tracing::info!(%addr, accounts = store.len(), "auth server listening");

    Ok(RunningServer { addr, store, shutdown: Some(tx), task })
}
