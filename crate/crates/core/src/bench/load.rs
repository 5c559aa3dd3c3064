use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use bytes::Bytes;
use tokio::task::JoinSet;
use tokio::time::Instant;

use super::record::{RequestRecord, RequestStatus};
use super::report::BenchReport;
use super::{bench_object, BenchConfig, BenchError, LoadShape, Scheme};
use crate::client::{Client, ClientConfig, ClientError, Verdict};
use crate::digest::object_digest;

/// Maps monotonic instants onto Unix milliseconds using a single anchor, so
/// wall-clock adjustments during a run cannot reorder records.
#[derive(Clone, Copy)]
struct Clock {
    anchor: Instant,
    anchor_unix_ms: f64,
}

impl Clock {
    fn now() -> Self {
        let unix = SystemTime::now().duration_since(UNIX_EPOCH).unwrap_or_default();
        Clock { anchor: Instant::now(), anchor_unix_ms: unix.as_secs_f64() * 1000.0 }
    }

    fn unix_ms(&self, t: Instant) -> f64 {
        self.anchor_unix_ms + t.duration_since(self.anchor).as_secs_f64() * 1000.0
    }
}

enum Payload {
    Hex(String),
    Object(Bytes),
}

struct Worker {
    client: Client,
    user: String,
    payload: Payload,
    clock: Clock,
}

impl Worker {
    async fn login(&self, seq: u64) -> RequestRecord {
        let sent = Instant::now();
        let result = match &self.payload {
            Payload::Hex(hex) => self.client.login_hash(&self.user, hex).await,
            Payload::Object(bytes) => self.client.login_object(&self.user, bytes.clone()).await,
        };
        let done = Instant::now();
        let (status, server_auth_ms) = match result {
            Ok(out) => {
                let status = match out.verdict {
                    Verdict::Accepted => RequestStatus::Accepted,
                    Verdict::Rejected => RequestStatus::Rejected,
                };
                (status, out.server_auth_ms)
            }
            Err(ClientError::Server { status, .. }) => (RequestStatus::Http(status), None),
            Err(e) => {
                tracing::debug!(seq, "request failed: {e}");
                (RequestStatus::Transport, None)
            }
        };
        RequestRecord {
            seq,
            send_unix_ms: self.clock.unix_ms(sent),
            done_unix_ms: self.clock.unix_ms(done),
            status,
            latency_ms: done.duration_since(sent).as_secs_f64() * 1000.0,
            server_auth_ms,
        }
    }
}

/// Runs one load experiment and returns its report.
///
/// Checks the server is up, signs up the bench account if it does not exist
/// yet (a 409 means it already does), then issues valid logins for it.
pub async fn run_load(cfg: &BenchConfig) -> Result<BenchReport, BenchError> {
    cfg.validate()?;
    let setup = Client::new(ClientConfig::new(&cfg.server)).map_err(BenchError::Unreachable)?;
    setup.health().await.map_err(BenchError::Unreachable)?;

    let object = bench_object(cfg.object_size);
    let user = cfg.user();
    match setup.signup(&user, object.clone()).await {
        Ok(_) | Err(ClientError::Server { status: 409, .. }) => {}
        Err(e) => return Err(BenchError::Setup(e)),
    }

    let payload = match cfg.scheme {
        Scheme::Hash => Payload::Hex(object_digest(&object).to_hex()),
        Scheme::Object => Payload::Object(object),
    };
    let client = Client::new(
        ClientConfig::new(&cfg.server)
            .with_timeout(request_timeout(cfg))
            .with_throttle(cfg.throttle_bps),
    )
    .map_err(BenchError::Unreachable)?;
    let worker = Arc::new(Worker { client, user, payload, clock: Clock::now() });

    let records = match cfg.load {
        LoadShape::OpenLoop { rate } => open_loop(worker, rate, cfg).await,
        LoadShape::ClosedLoop { clients } => closed_loop(worker, clients, cfg).await,
    };
    Ok(BenchReport::from_records(records))
}

/// Generous per-request timeout: twice the throttled upload time plus 30 s.
fn request_timeout(cfg: &BenchConfig) -> Duration {
    let upload = match (cfg.scheme, cfg.throttle_bps) {
        (Scheme::Object, Some(bps)) => cfg.object_size as f64 / bps.get() as f64,
        _ => 0.0,
    };
    Duration::from_secs_f64(2.0 * upload + 30.0)
}

/// Requests an open-loop run issues: `rate × duration`, rounded, at least one,
/// capped by `max_requests`.
pub fn open_loop_request_count(rate: f64, duration: Duration, max_requests: Option<u64>) -> u64 {
    let total = (rate * duration.as_secs_f64()).round().max(1.0) as u64;
    max_requests.map_or(total, |m| total.min(m))
}

async fn open_loop(worker: Arc<Worker>, rate: f64, cfg: &BenchConfig) -> Vec<RequestRecord> {
    let total = open_loop_request_count(rate, cfg.duration, cfg.max_requests);
    let start = Instant::now();
    let mut tasks = JoinSet::new();
    for seq in 0..total {
        tokio::time::sleep_until(start + Duration::from_secs_f64(seq as f64 / rate)).await;
        let worker = worker.clone();
        tasks.spawn(async move { worker.login(seq).await });
    }
    let mut records = Vec::with_capacity(total as usize);
    while let Some(r) = tasks.join_next().await {
        records.push(r.expect("load task panicked"));
    }
    records
}

async fn closed_loop(worker: Arc<Worker>, clients: u32, cfg: &BenchConfig) -> Vec<RequestRecord> {
    let deadline = Instant::now() + cfg.duration;
    let issued = Arc::new(AtomicU64::new(0));
    let max = cfg.max_requests.unwrap_or(u64::MAX);
    let mut tasks = JoinSet::new();
    for _ in 0..clients {
        let worker = worker.clone();
        let issued = issued.clone();
        tasks.spawn(async move {
            let mut mine = Vec::new();
            while Instant::now() < deadline {
                let seq = issued.fetch_add(1, Ordering::Relaxed);
                if seq >= max {
                    break;
                }
                mine.push(worker.login(seq).await);
            }
            mine
        });
    }
    let mut records = Vec::new();
    while let Some(r) = tasks.join_next().await {
        records.extend(r.expect("load task panicked"));
    }
    records
}
