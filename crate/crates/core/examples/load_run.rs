// A short open-loop load run against an in-process server, reported as CSV.
//
// The report has one row per request and `# key=value` summary lines at the
// end, including the throughput.

use std::error::Error;
use std::time::Duration;

use objauth::bench::{run_load, BenchConfig, LoadShape, Scheme};
use objauth::server::{self, ServerConfig};

async fn demo() -> Result<(), Box<dyn Error>> {
    let dir = tempfile::tempdir()?;
    let server = server::start(ServerConfig::new("127.0.0.1:0".parse()?, dir.path().join("accounts.jsonl"))).await?;

    let cfg = BenchConfig::new(
        server.base_url(),
        Scheme::Hash,
        LoadShape::OpenLoop { rate: 20.0 },
        Duration::from_secs(1),
        100_000,
    );
    let report = run_load(&cfg).await?;
    let s = &report.summary;
    println!(
        "{} requests, {} accepted, {:.2} req/s",
        s.requests,
        s.accepted,
        s.throughput_rps.unwrap_or_default()
    );
    assert_eq!(s.accepted, 20);

    let mut csv = Vec::new();
    report.write_csv(&mut csv)?;
    let text = String::from_utf8(csv)?;
    for line in text.lines().take(3).chain(text.lines().filter(|l| l.starts_with('#'))) {
        println!("{line}");
    }
    server.shutdown().await?;
    Ok(())
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    tokio::runtime::Runtime::new()?.block_on(demo())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
