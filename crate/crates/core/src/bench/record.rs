use std::fmt;
use std::str::FromStr;

use super::BenchError;

/// How a single load request ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RequestStatus {
    Accepted,
    Rejected,
    /// The server answered with some other HTTP status.
    Http(u16),
    /// No response: connection refused, reset, timed out.
    Transport,
}

impl RequestStatus {
    /// A response came back, whatever it said.
    pub fn is_completed(self) -> bool {
        !matches!(self, RequestStatus::Transport)
    }
}

impl fmt::Display for RequestStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RequestStatus::Accepted => f.write_str("accepted"),
            RequestStatus::Rejected => f.write_str("rejected"),
            RequestStatus::Http(code) => write!(f, "http_{code}"),
            RequestStatus::Transport => f.write_str("transport"),
        }
    }
}

impl FromStr for RequestStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "accepted" => Ok(RequestStatus::Accepted),
            "rejected" => Ok(RequestStatus::Rejected),
            "transport" => Ok(RequestStatus::Transport),
            other => other
                .strip_prefix("http_")
                .and_then(|c| c.parse().ok())
                .map(RequestStatus::Http)
                .ok_or_else(|| format!("unknown request status {other:?}")),
        }
    }
}

/// One request of a load run. Times are Unix epoch milliseconds derived from
/// a monotonic clock anchored once at the start of the run.
#[derive(Clone, Debug, PartialEq)]
pub struct RequestRecord {
    pub seq: u64,
    pub send_unix_ms: f64,
    pub done_unix_ms: f64,
    pub status: RequestStatus,
    /// Client wall time, measured directly on the monotonic clock.
    pub latency_ms: f64,
    pub server_auth_ms: Option<f64>,
}

/// Requests per second over a set of completed requests: the count divided
/// by the span from the earliest send to the latest completion.
///
/// The span mixes a send time and a completion time on purpose; that is the
/// definition used when comparing against published throughput numbers.
pub fn compute_throughput(records: &[RequestRecord]) -> Result<f64, BenchError> {
    if records.len() < 2 {
        return Err(BenchError::UndefinedThroughput(format!(
            "need at least 2 records, got {}",
            records.len()
        )));
    }
    let first_send = records.iter().map(|r| r.send_unix_ms).fold(f64::INFINITY, f64::min);
    let last_done = records.iter().map(|r| r.done_unix_ms).fold(f64::NEG_INFINITY, f64::max);
    let span_s = (last_done - first_send) / 1000.0;
    if !(span_s > 0.0) {
        return Err(BenchError::UndefinedThroughput(format!("non-positive span {span_s} s")));
    }
    Ok(records.len() as f64 / span_s)
}

/// Mean, median and 95th percentile (nearest rank).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatencyStats {
    pub mean: f64,
    pub median: f64,
    pub p95: f64,
}

impl LatencyStats {
    pub fn from_samples(samples: &[f64]) -> Option<Self> {
        if samples.is_empty() {
            return None;
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let mean = sorted.iter().sum::<f64>() / n as f64;
        let median = if n % 2 == 1 {
            sorted[n / 2]
        } else {
            (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
        };
        let rank = ((0.95 * n as f64).ceil() as usize).clamp(1, n);
        Some(LatencyStats { mean, median, p95: sorted[rank - 1] })
    }
}

/// Aggregates over a run, all derivable from the records alone.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchSummary {
    pub requests: u64,
    pub completed: u64,
    pub accepted: u64,
    pub rejected: u64,
    pub http_errors: u64,
    pub transport_errors: u64,
    /// `None` when fewer than two requests completed.
    pub throughput_rps: Option<f64>,
    pub latency_ms: Option<LatencyStats>,
    pub server_auth_mean_ms: Option<f64>,
    /// More than 10% of requests never got a response.
    pub failed: bool,
}

/// Share of requests allowed to fail at the transport level before a run is
/// flagged.
pub const MAX_TRANSPORT_ERROR_RATE: f64 = 0.10;

impl BenchSummary {
    pub fn from_records(records: &[RequestRecord]) -> Self {
        let completed: Vec<RequestRecord> =
            records.iter().filter(|r| r.status.is_completed()).cloned().collect();
        let count = |want: fn(&RequestStatus) -> bool| records.iter().filter(|r| want(&r.status)).count() as u64;
        let transport_errors = count(|s| *s == RequestStatus::Transport);

        let latencies: Vec<f64> = completed.iter().map(|r| r.latency_ms).collect();
        let auth: Vec<f64> = completed.iter().filter_map(|r| r.server_auth_ms).collect();
        let requests = records.len() as u64;

        BenchSummary {
            requests,
            completed: completed.len() as u64,
            accepted: count(|s| *s == RequestStatus::Accepted),
            rejected: count(|s| *s == RequestStatus::Rejected),
            http_errors: count(|s| matches!(s, RequestStatus::Http(_))),
            transport_errors,
            throughput_rps: compute_throughput(&completed).ok(),
            latency_ms: LatencyStats::from_samples(&latencies),
            server_auth_mean_ms: (!auth.is_empty()).then(|| auth.iter().sum::<f64>() / auth.len() as f64),
            failed: requests > 0
                && transport_errors as f64 > MAX_TRANSPORT_ERROR_RATE * requests as f64,
        }
    }
}
