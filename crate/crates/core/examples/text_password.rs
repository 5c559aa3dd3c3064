// Ordinary text passwords, for comparison with object passwords.
//
// Text sign-up is off by default; the server has to opt in. Logging in
// uses the same endpoint as the hash scheme.

use std::error::Error;

use objauth::client::{Client, ClientConfig, Verdict};
use objauth::server::{self, ServerConfig};

async fn demo() -> Result<(), Box<dyn Error>> {
    let dir = tempfile::tempdir()?;
    let mut cfg = ServerConfig::new("127.0.0.1:0".parse()?, dir.path().join("accounts.jsonl"));
    cfg.allow_text_signup = true;
    let server = server::start(cfg).await?;
    let client = Client::new(ClientConfig::new(server.base_url()))?;

    client.signup_text("bob", "correct horse battery staple").await?;
    let good = client.login_hash("bob", "correct horse battery staple").await?;
    let bad = client.login_hash("bob", "Correct horse battery staple").await?;
    println!("right password: {}", good.verdict.as_str());
    println!("wrong case:     {}", bad.verdict.as_str());
    assert_eq!(good.verdict, Verdict::Accepted);
    assert_eq!(bad.verdict, Verdict::Rejected);

    server.shutdown().await?;
    Ok(())
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    tokio::runtime::Runtime::new()?.block_on(demo())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
