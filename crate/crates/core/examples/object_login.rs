// Sign up with an object, then log in with either scheme.
//
// Starts a throwaway server in-process; the object scheme uploads the bytes
// and the server digests them, the hash scheme sends the digest computed
// locally. Both end up checking the same stored hash.

use std::error::Error;

use objauth::client::{Client, ClientConfig, Verdict};
use objauth::object_digest;
use objauth::server::{self, ServerConfig};

async fn demo() -> Result<(), Box<dyn Error>> {
    let dir = tempfile::tempdir()?;
    let server = server::start(ServerConfig::new("127.0.0.1:0".parse()?, dir.path().join("accounts.jsonl"))).await?;
    let client = Client::new(ClientConfig::new(server.base_url()))?;

    let photo: Vec<u8> = (0..50_000u32).map(|i| (i * 7 % 251) as u8).collect();
    let out = client.signup("alice", photo.clone()).await?;
    println!("signed up alice ({:.3} ms on the server)", out.server_auth_ms.unwrap_or_default());

    let by_object = client.login_object("alice", photo.clone()).await?;
    println!("object login: {} in {:.3} ms", by_object.verdict.as_str(), by_object.wall_ms);

    let hex = object_digest(&photo).to_hex();
    let by_hash = client.login_hash("alice", &hex).await?;
    println!("hash login:   {} in {:.3} ms", by_hash.verdict.as_str(), by_hash.wall_ms);

    let mut other = photo;
    other[123] ^= 0x40;
    let wrong = client.login_object("alice", other).await?;
    println!("edited photo: {}", wrong.verdict.as_str());

    assert_eq!(by_object.verdict, Verdict::Accepted);
    assert_eq!(by_hash.verdict, Verdict::Accepted);
    assert_eq!(wrong.verdict, Verdict::Rejected);
    server.shutdown().await?;
    Ok(())
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    tokio::runtime::Runtime::new()?.block_on(demo())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
