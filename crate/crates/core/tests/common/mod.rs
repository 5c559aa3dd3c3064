#![allow(dead_code)]

use std::time::Duration;

use objauth::client::{Client, ClientConfig};
use objauth::server::{self, RunningServer, ServerConfig};
use rand::{Rng, SeedableRng};
use tempfile::TempDir;

pub struct TestServer {
    pub server: RunningServer,
    pub dir: TempDir,
}

impl TestServer {
    pub fn store_path(&self) -> std::path::PathBuf {
        self.dir.path().join("accounts.jsonl")
    }

    pub fn client(&self) -> Client {
        Client::new(ClientConfig::new(self.server.base_url())).unwrap()
    }
}

pub fn config(dir: &TempDir) -> ServerConfig {
    ServerConfig::new("127.0.0.1:0".parse().unwrap(), dir.path().join("accounts.jsonl"))
}

pub async fn start() -> TestServer {
    start_with(|_| {}).await
}

pub async fn start_with(tweak: impl FnOnce(&mut ServerConfig)) -> TestServer {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(&dir);
    tweak(&mut cfg);
    let server = server::start(cfg).await.unwrap();
    TestServer { server, dir }
}

pub fn random_bytes(seed: u64, len: usize) -> Vec<u8> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut v = vec![0u8; len];
    rng.fill(&mut v[..]);
    v
}

pub fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 { xs[n / 2] } else { (xs[n / 2 - 1] + xs[n / 2]) / 2.0 }
}

pub const SHORT: Duration = Duration::from_millis(50);
