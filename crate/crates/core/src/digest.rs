//! SHA-256 object digests and their canonical text form.
//!
//! The lowercase hex encoding of a [`Digest`] is the "text version" of an
//! object: it can be written down, pasted into a login form, or sent over the
//! wire in place of the object itself.

use std::fmt;
use std::io::{self, Read};
use std::str::FromStr;

use sha2::{Digest as _, Sha256};
use thiserror::Error;

/// Length of a SHA-256 digest in bytes.
pub const DIGEST_LEN: usize = 32;

/// Length of the canonical hex encoding of a digest.
pub const DIGEST_HEX_LEN: usize = DIGEST_LEN * 2;

/// Read size used when streaming objects through the hasher.
pub const STREAM_CHUNK: usize = 64 * 1024;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HexDecodeError {
    #[error("expected {DIGEST_HEX_LEN} hex characters, got {0}")]
    Length(usize),
    #[error("invalid hex character {ch:?} at offset {index}")]
    InvalidChar { ch: char, index: usize },
}

/// A 32-byte SHA-256 value.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Digest([u8; DIGEST_LEN]);

impl Digest {
    pub const fn from_bytes(bytes: [u8; DIGEST_LEN]) -> Self {
        Digest(bytes)
    }

    pub fn as_bytes(&self) -> &[u8; DIGEST_LEN] {
        &self.0
    }

    /// Canonical lowercase hex, always 64 characters.
    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    /// Parses 64 hex characters in either case.
    pub fn from_hex(s: &str) -> Result<Self, HexDecodeError> {
        if s.len() != DIGEST_HEX_LEN {
            return Err(HexDecodeError::Length(s.len()));
        }
        if let Some((index, ch)) = s.char_indices().find(|(_, c)| !c.is_ascii_hexdigit()) {
            return Err(HexDecodeError::InvalidChar { ch, index });
        }
        let mut out = [0u8; DIGEST_LEN];
        // Length and charset were checked above, so decoding cannot fail.
        hex::decode_to_slice(s, &mut out).expect("validated hex");
        Ok(Digest(out))
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest({})", self.to_hex())
    }
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl FromStr for Digest {
    type Err = HexDecodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Digest::from_hex(s)
    }
}

impl From<[u8; DIGEST_LEN]> for Digest {
    fn from(bytes: [u8; DIGEST_LEN]) -> Self {
        Digest(bytes)
    }
}

/// True when `s` is exactly 64 ASCII hex digits (either case).
pub fn is_digest_hex(s: &str) -> bool {
    s.len() == DIGEST_HEX_LEN && s.bytes().all(|b| b.is_ascii_hexdigit())
}

/// SHA-256 over the raw object bytes. Names and metadata play no part.
pub fn object_digest(object: &[u8]) -> Digest {
    Digest(Sha256::digest(object).into())
}

/// Incremental digest for objects that arrive in pieces (uploads, files).
#[derive(Clone, Default)]
pub struct ObjectHasher {
    inner: Sha256,
    len: u64,
}

impl ObjectHasher {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn update(&mut self, chunk: &[u8]) {
        self.inner.update(chunk);
        self.len += chunk.len() as u64;
    }

    /// Bytes fed so far.
    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn finish(self) -> Digest {
        Digest(self.inner.finalize().into())
    }
}

/// Digests everything readable from `reader` in fixed-size chunks, so memory
/// use does not depend on object size. Returns the digest and the byte count.
pub fn digest_reader<R: Read>(mut reader: R) -> io::Result<(Digest, u64)> {
    let mut hasher = ObjectHasher::new();
    let mut buf = vec![0u8; STREAM_CHUNK];
    loop {
        match reader.read(&mut buf) {
            Ok(0) => break,
            Ok(n) => hasher.update(&buf[..n]),
            Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
            Err(e) => return Err(e),
        }
    }
    let len = hasher.len();
    Ok((hasher.finish(), len))
}

/// Streaming digest of a file's content.
pub fn digest_file(path: impl AsRef<std::path::Path>) -> io::Result<Digest> {
    let file = std::fs::File::open(path)?;
    digest_reader(io::BufReader::with_capacity(STREAM_CHUNK, file)).map(|(d, _)| d)
}
