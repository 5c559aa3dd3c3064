//! CSV form of a load run.
//!
//! ```text
//! seq,send_unix_ms,done_unix_ms,status,latency_ms,server_auth_ms
//! 0,1760000000000.125,1760000000001.5,accepted,1.375,0.052
//! ...
//! # requests=60
//! # throughput_rps=2.0016
//! ```
//!
//! Rows hold the raw per-request data; the `#` footer repeats the aggregates.
//! Floats are written in shortest round-trip form, so aggregates recomputed
//! from parsed rows match the footer exactly.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::record::{BenchSummary, LatencyStats, RequestRecord};
use super::BenchError;

pub const CSV_HEADER: [&str; 6] =
    ["seq", "send_unix_ms", "done_unix_ms", "status", "latency_ms", "server_auth_ms"];

/// Everything a load run produced.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub records: Vec<RequestRecord>,
    pub summary: BenchSummary,
}

#[derive(Serialize, Deserialize)]
struct Row {
    seq: u64,
    send_unix_ms: f64,
    done_unix_ms: f64,
    status: String,
    latency_ms: f64,
    server_auth_ms: Option<f64>,
}

impl BenchReport {
    pub fn from_records(mut records: Vec<RequestRecord>) -> Self {
        records.sort_by_key(|r| r.seq);
        let summary = BenchSummary::from_records(&records);
        BenchReport { records, summary }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), BenchError> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        w.write_record(CSV_HEADER)?;
        for r in &self.records {
            w.serialize(Row {
                seq: r.seq,
                send_unix_ms: r.send_unix_ms,
                done_unix_ms: r.done_unix_ms,
                status: r.status.to_string(),
                latency_ms: r.latency_ms,
                server_auth_ms: r.server_auth_ms,
            })?;
        }
        let mut out = w.into_inner().map_err(|e| BenchError::Io(e.into_error()))?;
        for (key, value) in footer(&self.summary) {
            writeln!(out, "# {key}={value}")?;
        }
        out.flush()?;
        Ok(())
    }

    /// Parses rows and rebuilds the summary from them. The footer is ignored
    /// here; use [`read_footer`] to get it.
    pub fn read_csv<R: BufRead>(input: R) -> Result<Self, BenchError> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
        let headers = rdr.headers()?.clone();
        if headers.iter().ne(CSV_HEADER) {
            return Err(BenchError::Report(format!("unexpected header {headers:?}")));
        }
        let mut records = Vec::new();
        for row in rdr.deserialize::<Row>() {
            let row = row?;
            records.push(RequestRecord {
                seq: row.seq,
                send_unix_ms: row.send_unix_ms,
                done_unix_ms: row.done_unix_ms,
                status: row.status.parse().map_err(BenchError::Report)?,
                latency_ms: row.latency_ms,
                server_auth_ms: row.server_auth_ms,
            });
        }
        Ok(BenchReport::from_records(records))
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Footer key/value pairs, in output order.
pub fn footer(s: &BenchSummary) -> Vec<(&'static str, String)> {
    let lat = |f: fn(&LatencyStats) -> f64| opt(s.latency_ms.as_ref().map(f));
    vec![
        ("requests", s.requests.to_string()),
        ("completed", s.completed.to_string()),
        ("accepted", s.accepted.to_string()),
        ("rejected", s.rejected.to_string()),
        ("http_errors", s.http_errors.to_string()),
        ("transport_errors", s.transport_errors.to_string()),
        ("throughput_rps", opt(s.throughput_rps)),
        ("latency_mean_ms", lat(|l| l.mean)),
        ("latency_median_ms", lat(|l| l.median)),
        ("latency_p95_ms", lat(|l| l.p95)),
        ("server_auth_mean_ms", opt(s.server_auth_mean_ms)),
        ("failed", s.failed.to_string()),
    ]
}

/// Reads the `# key=value` footer lines of a report.
pub fn read_footer<R: BufRead>(input: R) -> Result<BTreeMap<String, String>, BenchError> {
    let mut map = BTreeMap::new();
    for line in input.lines() {
        let line = line?;
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((k, v)) = rest.trim().split_once('=') {
                map.insert(k.to_owned(), v.to_owned());
            }
        }
    }
    Ok(map)
}

impl From<csv::Error> for BenchError {
    fn from(e: csv::Error) -> Self {
        BenchError::Report(e.to_string())
    }
}
