use std::hint::black_box;
use std::io::Write;
use std::num::NonZeroU64;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, RngCore, SeedableRng};

use super::report::BenchReport;
use super::{run_load, BenchConfig, BenchError, LoadShape, Scheme};
use crate::digest::object_digest;

#[derive(Clone, Debug)]
pub struct SizeSweepConfig {
    pub server: String,
    pub scheme: Scheme,
    /// Object sizes in bytes, strictly ascending.
    pub sizes: Vec<u64>,
    /// Sequential logins measured per size.
    pub requests_per_size: u64,
    /// Untimed logins sent before each size's measured run.
    pub warmup_per_size: u64,
    pub throttle_bps: Option<NonZeroU64>,
}

/// Mean login latency for one object size.
#[derive(Clone, Debug, PartialEq)]
pub struct SizeRow {
    pub size: u64,
    pub requests: u64,
    pub mean_latency_ms: f64,
    pub median_latency_ms: f64,
    pub mean_server_auth_ms: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct SizeSweep {
    pub scheme: Scheme,
    pub rows: Vec<SizeRow>,
    /// The underlying run for each row, same order.
    pub reports: Vec<BenchReport>,
}

impl SizeSweep {
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "scheme,size_bytes,requests,mean_latency_ms,median_latency_ms,mean_server_auth_ms")?;
        for r in &self.rows {
            let auth = r.mean_server_auth_ms.map(|v| v.to_string()).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{},{}",
                self.scheme, r.size, r.requests, r.mean_latency_ms, r.median_latency_ms, auth
            )?;
        }
        Ok(())
    }
}

/// Login latency as a function of object size.
///
/// Each size gets its own account, created from the deterministic bench
/// object for that size, and a single client issuing
/// `requests_per_size` logins back to back, after `warmup_per_size`
/// discarded ones.
pub async fn sweep_object_size(cfg: &SizeSweepConfig) -> Result<SizeSweep, BenchError> {
    if cfg.sizes.is_empty() {
        return Err(BenchError::Config("no sizes to sweep".into()));
    }
    if cfg.sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(BenchError::Config("sizes must be strictly ascending".into()));
    }
    if cfg.requests_per_size == 0 {
        return Err(BenchError::Config("requests per size must be at least 1".into()));
    }

    let mut rows = Vec::with_capacity(cfg.sizes.len());
    let mut reports = Vec::with_capacity(cfg.sizes.len());
    for &size in &cfg.sizes {
        let mut run = BenchConfig::new(
            &cfg.server,
            cfg.scheme,
            LoadShape::ClosedLoop { clients: 1 },
            // bounded by the request count, not the clock
            Duration::from_secs(24 * 3600),
            size,
        );
        run.throttle_bps = cfg.throttle_bps;
        if cfg.warmup_per_size > 0 {
            run.max_requests = Some(cfg.warmup_per_size);
            run_load(&run).await?;
        }
        run.max_requests = Some(cfg.requests_per_size);
        let report = run_load(&run).await?;
        let latency = report.summary.latency_ms.ok_or_else(|| {
            BenchError::Report(format!("no completed requests for size {size}"))
        })?;
        rows.push(SizeRow {
            size,
            requests: report.summary.completed,
            mean_latency_ms: latency.mean,
            median_latency_ms: latency.median,
            mean_server_auth_ms: report.summary.server_auth_mean_ms,
        });
        reports.push(report);
    }
    Ok(SizeSweep { scheme: cfg.scheme, rows, reports })
}

/// Local digest timing for one fixture.
#[derive(Clone, Debug, PartialEq)]
pub struct TypeRow {
    pub name: String,
    pub size: usize,
    pub iterations: usize,
    pub mean_ms: f64,
    pub std_ms: f64,
    pub min_ms: f64,
}

/// Times [`object_digest`] on each fixture `iterations` times.
///
/// Fixtures must all be the same size. Iterations are interleaved across
/// fixtures so drift in machine load hits every fixture alike.
pub fn sweep_file_type(fixtures: &[(String, Vec<u8>)], iterations: usize) -> Result<Vec<TypeRow>, BenchError> {
    let Some((_, first)) = fixtures.first() else {
        return Err(BenchError::Config("no fixtures".into()));
    };
    if fixtures.iter().any(|(_, data)| data.len() != first.len()) {
        return Err(BenchError::Config("fixtures must all be the same size".into()));
    }
    if iterations == 0 {
        return Err(BenchError::Config("iterations must be at least 1".into()));
    }

    // untimed passes to fault in pages, warm caches and let the clock ramp up
    let warm_until = Instant::now() + Duration::from_millis(200);
    while Instant::now() < warm_until {
        for (_, data) in fixtures {
            black_box(object_digest(black_box(data)));
        }
    }

    let mut samples = vec![Vec::with_capacity(iterations); fixtures.len()];
    for _ in 0..iterations {
        for (i, (_, data)) in fixtures.iter().enumerate() {
            let t = Instant::now();
            black_box(object_digest(black_box(data)));
            samples[i].push(t.elapsed().as_secs_f64() * 1000.0);
        }
    }

    Ok(fixtures
        .iter()
        .zip(samples)
        .map(|((name, data), s)| {
            let n = s.len() as f64;
            let mean = s.iter().sum::<f64>() / n;
            let var = s.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
            TypeRow {
                name: name.clone(),
                size: data.len(),
                iterations,
                mean_ms: mean,
                std_ms: var.sqrt(),
                min_ms: s.iter().copied().fold(f64::INFINITY, f64::min),
            }
        })
        .collect())
}

const WORDS: &[&str] = &[
    "the", "object", "password", "holiday", "photo", "song", "of", "and", "a", "to", "in",
    "server", "login", "user", "is", "with", "for", "media", "file", "digest",
];

/// Equal-size synthetic fixtures of different content classes:
/// `random` bytes, English-like ASCII `text`, `structured` CSV records and
/// constant `zeros`.
pub fn content_fixtures(size: usize) -> Vec<(String, Vec<u8>)> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(size as u64);

    let mut random = vec![0u8; size];
    rng.fill_bytes(&mut random);

    let mut text = Vec::with_capacity(size + 16);
    while text.len() < size {
        text.extend_from_slice(WORDS[rng.random_range(0..WORDS.len())].as_bytes());
        text.push(if rng.random_ratio(1, 12) { b'\n' } else { b' ' });
    }
    text.truncate(size);

    let mut structured = Vec::with_capacity(size + 64);
    structured.extend_from_slice(b"id,name,width,height,bytes\n");
    let mut id = 0u64;
    while structured.len() < size {
        let line = format!("{id},img_{id:06}.jpg,{},{},{}\n", 640 + id % 7, 480 + id % 5, 1000 + id * 37);
        structured.extend_from_slice(line.as_bytes());
        id += 1;
    }
    structured.truncate(size);

    vec![
        ("random".to_owned(), random),
        ("text".to_owned(), text),
        ("structured".to_owned(), structured),
        ("zeros".to_owned(), vec![0u8; size]),
    ]
}

/// Reads fixture files, naming each by its file name.
pub fn load_fixtures<P: AsRef<Path>>(paths: &[P]) -> Result<Vec<(String, Vec<u8>)>, BenchError> {
    paths
        .iter()
        .map(|p| {
            let p = p.as_ref();
            let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            Ok((name, std::fs::read(p)?))
        })
        .collect()
}
