//! Salted stored-hash derivation and credential verification.
//!
//! The same pipeline serves every scheme. A text password and the hex digest
//! of an object are both just byte strings by the time they reach
//! [`derive_stored_hash`]:
//!
//! ```text
//! stored = SHA-256(password_bytes || salt_bytes)
//! ```
//!
//! This is a single round of SHA-256 with a 128-bit salt. It is not a slow or
//! memory-hard KDF.

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest as _, Sha256};
use subtle::ConstantTimeEq;
use thiserror::Error;

use crate::digest::{is_digest_hex, Digest};

pub const SALT_LEN: usize = 16;
pub const MAX_USER_ID_LEN: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CredentialError {
    #[error("password must not be empty")]
    EmptyPassword,
    #[error("user id must not be empty")]
    EmptyUserId,
    #[error("user id is {0} bytes, limit is {MAX_USER_ID_LEN}")]
    UserIdTooLong(usize),
    #[error("user id contains a control character")]
    UserIdControlChar,
    #[error("randomness source failed: {0}")]
    Randomness(String),
}

/// Account identifier: 1 to 64 bytes of UTF-8 without control characters.
/// Comparison is exact (case-sensitive).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct UserId(String);

impl UserId {
    pub fn new(id: impl Into<String>) -> Result<Self, CredentialError> {
        let id = id.into();
        if id.is_empty() {
            return Err(CredentialError::EmptyUserId);
        }
        if id.len() > MAX_USER_ID_LEN {
            return Err(CredentialError::UserIdTooLong(id.len()));
        }
        if id.chars().any(char::is_control) {
            return Err(CredentialError::UserIdControlChar);
        }
        Ok(UserId(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for UserId {
    type Error = CredentialError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        UserId::new(value)
    }
}

impl From<UserId> for String {
    fn from(id: UserId) -> Self {
        id.0
    }
}

impl fmt::Debug for UserId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&self.0, f)
    }
}

impl fmt::Display for UserId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Per-account random salt.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Salt([u8; SALT_LEN]);

impl Salt {
    pub const fn from_bytes(bytes: [u8; SALT_LEN]) -> Self {
        Salt(bytes)
    }

    pub fn as_bytes(&self) -> &[u8; SALT_LEN] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self, hex::FromHexError> {
        let mut out = [0u8; SALT_LEN];
        hex::decode_to_slice(s, &mut out)?;
        Ok(Salt(out))
    }
}

impl fmt::Debug for Salt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Salt({})", self.to_hex())
    }
}

/// Draws a fresh salt from the operating system CSPRNG. There is no fallback:
/// if the OS source fails, so does this.
pub fn generate_salt() -> Result<Salt, CredentialError> {
    let mut bytes = [0u8; SALT_LEN];
    getrandom::fill(&mut bytes).map_err(|e| CredentialError::Randomness(e.to_string()))?;
    Ok(Salt(bytes))
}

/// The byte string fed to the stored-hash step: either a text password or the
/// lowercase hex of an object digest.
#[derive(Clone, PartialEq, Eq)]
pub struct PasswordString(Vec<u8>);

impl PasswordString {
    pub fn new(bytes: impl Into<Vec<u8>>) -> Result<Self, CredentialError> {
        let bytes = bytes.into();
        if bytes.is_empty() {
            return Err(CredentialError::EmptyPassword);
        }
        Ok(PasswordString(bytes))
    }

    /// Text form of an object: the digest's canonical hex, as ASCII bytes.
    pub fn from_digest(digest: &Digest) -> Self {
        PasswordString(digest.to_hex().into_bytes())
    }

    /// A password as typed or pasted by a user. Anything that looks like a
    /// digest (64 hex characters) is lowercased so a transcribed digest matches
    /// regardless of case; other strings are taken verbatim.
    pub fn from_submitted(s: &str) -> Result<Self, CredentialError> {
        if is_digest_hex(s) {
            Ok(PasswordString(s.to_ascii_lowercase().into_bytes()))
        } else {
            PasswordString::new(s.as_bytes())
        }
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl From<Digest> for PasswordString {
    fn from(d: Digest) -> Self {
        PasswordString::from_digest(&d)
    }
}

impl fmt::Debug for PasswordString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PasswordString({} bytes)", self.0.len())
    }
}

/// SHA-256 over the password bytes followed by the salt bytes.
pub fn derive_stored_hash(password: &PasswordString, salt: &Salt) -> Digest {
    let mut h = Sha256::new();
    h.update(password.as_bytes());
    h.update(salt.as_bytes());
    Digest::from_bytes(h.finalize().into())
}

/// What the server keeps per user.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AccountRecord {
    pub user_id: UserId,
    pub pwd_hash: Digest,
    pub salt: Salt,
}

impl AccountRecord {
    /// Builds a record for a new account with a freshly generated salt.
    pub fn create(user_id: UserId, password: &PasswordString) -> Result<Self, CredentialError> {
        let salt = generate_salt()?;
        Ok(Self::with_salt(user_id, password, salt))
    }

    pub fn with_salt(user_id: UserId, password: &PasswordString, salt: Salt) -> Self {
        AccountRecord {
            pwd_hash: derive_stored_hash(password, &salt),
            user_id,
            salt,
        }
    }
}

/// Recomputes the stored hash under the record's salt and compares in
/// constant time.
pub fn verify_credentials(password: &PasswordString, record: &AccountRecord) -> bool {
    let candidate = derive_stored_hash(password, &record.salt);
    candidate.as_bytes().ct_eq(record.pwd_hash.as_bytes()).into()
}
