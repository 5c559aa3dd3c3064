//! Object-based password authentication.
//!
//! A user's password can be a text string or any file. For files, the SHA-256
//! of the raw bytes (as 64 lowercase hex characters) stands in for the text
//! password, so the server runs one verification pipeline for all schemes:
//!
//! * **text**: the client sends the password string.
//! * **object-hash**: the client digests the file locally and sends the hex.
//! * **object**: the client uploads the file and the server digests it.
//!
//! Modules:
//!
//! * [`digest`] and [`credential`]: the pure hashing and verification pipeline.
//! * [`store`]: the file-backed account table.
//! * [`server`]: the HTTP login service.
//! * [`client`]: an HTTP client for the service, with optional upload throttling.
//! * [`bench`]: load generation, throughput and latency reports, size and
//!   file-type sweeps.

pub mod bench;
pub mod cli;
pub mod client;
pub mod credential;
pub mod digest;
pub mod server;
pub mod store;

pub use credential::{
    derive_stored_hash, generate_salt, verify_credentials, AccountRecord, CredentialError,
    PasswordString, Salt, UserId,
};
pub use digest::{object_digest, Digest, HexDecodeError, ObjectHasher};
pub use store::{AccountStore, StoreError};
