//! Load generation and measurement against a running login service.
//!
//! [`run_load`] drives one account with valid logins, either open-loop (a
//! fixed send rate, whatever the server does) or closed-loop (N clients, each
//! waiting for its response before sending again), and returns a
//! [`BenchReport`]. The sweeps in [`sweep`] repeat that across object sizes,
//! or time local digesting across content types.

mod load;
pub mod record;
pub mod report;
pub mod sweep;

use std::fmt;
use std::num::NonZeroU64;
use std::str::FromStr;
use std::time::Duration;

use bytes::Bytes;
use rand::{RngCore, SeedableRng};
use thiserror::Error;

use crate::client::ClientError;

pub use load::{open_loop_request_count, run_load};
pub use record::{compute_throughput, BenchSummary, LatencyStats, RequestRecord, RequestStatus};
pub use report::BenchReport;
pub use sweep::{
    content_fixtures, sweep_file_type, sweep_object_size, SizeRow, SizeSweep, SizeSweepConfig,
    TypeRow,
};

/// A slow 0.22 Mbit/s client uplink, in bytes per second.
pub const SLOW_UPLINK_BPS: u64 = 220_000 / 8;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid bench configuration: {0}")]
    Config(String),
    #[error("server unreachable: {0}")]
    Unreachable(ClientError),
    #[error("could not prepare bench account: {0}")]
    Setup(ClientError),
    #[error("throughput undefined: {0}")]
    UndefinedThroughput(String),
    #[error("bad report: {0}")]
    Report(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// Send the object's hex digest, computed once on the client.
    Hash,
    /// Upload the object on every request.
    Object,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Hash => "hash",
            Scheme::Object => "object",
        })
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hash" => Ok(Scheme::Hash),
            "object" => Ok(Scheme::Object),
            other => Err(format!("unknown scheme {other:?} (expected hash or object)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LoadShape {
    /// Requests issued at `rate` per second regardless of completions.
    OpenLoop { rate: f64 },
    /// `clients` concurrent loops, each sending its next request as soon as
    /// the previous one completes.
    ClosedLoop { clients: u32 },
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub server: String,
    pub scheme: Scheme,
    pub load: LoadShape,
    /// Issuing window. Requests still in flight at the end are waited for.
    pub duration: Duration,
    pub object_size: u64,
    /// Per-request upload pacing (object scheme only).
    pub throttle_bps: Option<NonZeroU64>,
    /// Stop issuing after this many requests even if time remains.
    pub max_requests: Option<u64>,
    /// Bench account; defaults to [`bench_user`] for the object size.
    pub user_id: Option<String>,
}

impl BenchConfig {
    pub fn new(server: impl Into<String>, scheme: Scheme, load: LoadShape, duration: Duration, object_size: u64) -> Self {
        BenchConfig {
            server: server.into(),
            scheme,
            load,
            duration,
            object_size,
            throttle_bps: None,
            max_requests: None,
            user_id: None,
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: &str| Err(BenchError::Config(m.to_owned()));
        match self.load {
            LoadShape::OpenLoop { rate } if !(rate.is_finite() && rate > 0.0) => {
                return bad("rate must be a positive number")
            }
            LoadShape::ClosedLoop { clients: 0 } => return bad("client count must be at least 1"),
            _ => {}
        }
        if self.duration.is_zero() {
            return bad("duration must be positive");
        }
        if self.object_size == 0 {
            return bad("object size must be at least 1 byte");
        }
        if self.max_requests == Some(0) {
            return bad("max requests must be at least 1");
        }
        Ok(())
    }

    pub fn user(&self) -> String {
        self.user_id.clone().unwrap_or_else(|| bench_user(self.object_size))
    }
}

/// Account name used for objects of `size` bytes.
pub fn bench_user(size: u64) -> String {
    format!("bench-{size}")
}

/// Deterministic pseudo-random object of `size` bytes, seeded by the size.
pub fn bench_object(size: u64) -> Bytes {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(size);
    let mut buf = vec![0u8; size as usize];
    rng.fill_bytes(&mut buf);
    Bytes::from(buf)
}
