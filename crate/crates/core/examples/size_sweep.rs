// Login latency against object size, for both schemes.
//
// The hash scheme sends 64 characters whatever the object size, so its
// latency stays flat. The object scheme uploads every byte; with the client
// uplink throttled its latency grows with the object.

use std::error::Error;
use std::num::NonZeroU64;

use objauth::bench::{sweep_object_size, Scheme, SizeSweepConfig};
use objauth::server::{self, ServerConfig};

async fn demo() -> Result<(), Box<dyn Error>> {
    let dir = tempfile::tempdir()?;
    let server = server::start(ServerConfig::new("127.0.0.1:0".parse()?, dir.path().join("accounts.jsonl"))).await?;

    for (scheme, requests, throttle) in [(Scheme::Hash, 50, None), (Scheme::Object, 2, NonZeroU64::new(4_000_000))] {
        let sweep = sweep_object_size(&SizeSweepConfig {
            server: server.base_url(),
            scheme,
            sizes: vec![10_000, 100_000, 1_000_000],
            requests_per_size: requests,
            warmup_per_size: 1,
            throttle_bps: throttle,
        })
        .await?;
        sweep.write_csv(std::io::stdout().lock())?;
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
