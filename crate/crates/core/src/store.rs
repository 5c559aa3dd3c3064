//! File-backed account table.
//!
//! One JSON object per line:
//!
//! ```text
//! {"user_id":"alice","pwd_hash":"<64 hex>","salt":"<32 hex>"}
//! ```
//!
//! New accounts are appended and fsynced before `create_account` returns.
//! The whole table is held in memory; lookups never touch the file.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::credential::{AccountRecord, Salt, UserId};
use crate::digest::Digest;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("store i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("corrupt record on line {line}: {reason}")]
    Corrupt { line: usize, reason: String },
    #[error("user {0} already exists")]
    AlreadyExists(UserId),
    #[error("user {0} not found")]
    NotFound(UserId),
}

/// On-disk shape of a record. Field order is the wire order.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StoredLine {
    user_id: String,
    pwd_hash: String,
    salt: String,
}

impl StoredLine {
    fn from_record(r: &AccountRecord) -> Self {
        StoredLine {
            user_id: r.user_id.as_str().to_owned(),
            pwd_hash: r.pwd_hash.to_hex(),
            salt: r.salt.to_hex(),
        }
    }

    fn into_record(self) -> Result<AccountRecord, String> {
        let user_id = UserId::new(self.user_id).map_err(|e| e.to_string())?;
        if !is_lower_hex(&self.pwd_hash, 64) {
            return Err("pwd_hash must be 64 lowercase hex characters".into());
        }
        if !is_lower_hex(&self.salt, 32) {
            return Err("salt must be 32 lowercase hex characters".into());
        }
        let pwd_hash = Digest::from_hex(&self.pwd_hash).map_err(|e| e.to_string())?;
        let salt = Salt::from_hex(&self.salt).map_err(|e| e.to_string())?;
        Ok(AccountRecord { user_id, pwd_hash, salt })
    }
}

fn is_lower_hex(s: &str, len: usize) -> bool {
    s.len() == len && s.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f'))
}

/// Serializes one record as its exact line in the backing file, LF included.
pub fn encode_line(record: &AccountRecord) -> String {
    let mut line = serde_json::to_string(&StoredLine::from_record(record))
        .expect("string fields always serialize");
    line.push('\n');
    line
}

/// Handle to an open account table. Share it behind an `Arc`; it does its own
/// locking (many readers, one writer at a time).
#[derive(Debug)]
pub struct AccountStore {
    path: PathBuf,
    index: RwLock<HashMap<UserId, AccountRecord>>,
    writer: Mutex<File>,
}

impl AccountStore {
    /// Loads every record from `path`, creating an empty file if none exists.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, StoreError> {
        let path = path.as_ref().to_path_buf();
        let existed = path.exists();
        let mut index = HashMap::new();

        if existed {
            let reader = BufReader::new(File::open(&path)?);
            for (i, line) in reader.split(b'\n').enumerate() {
                let line_no = i + 1;
                let line = line?;
                if line.is_empty() {
                    continue;
                }
                let parsed: StoredLine = serde_json::from_slice(&line)
                    .map_err(|e| StoreError::Corrupt { line: line_no, reason: e.to_string() })?;
                let record = parsed
                    .into_record()
                    .map_err(|reason| StoreError::Corrupt { line: line_no, reason })?;
                if index.contains_key(&record.user_id) {
                    return Err(StoreError::Corrupt {
                        line: line_no,
                        reason: format!("duplicate user id {}", record.user_id),
                    });
                }
                index.insert(record.user_id.clone(), record);
            }
        }

        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        if !existed {
            file.sync_all()?;
            sync_parent_dir(&path)?;
        }

        Ok(AccountStore {
            path,
            index: RwLock::new(index),
            writer: Mutex::new(file),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Appends a new account. Fails without touching the file if the user id
    /// is taken.
    pub fn create_account(&self, record: AccountRecord) -> Result<(), StoreError> {
        let mut file = self.writer.lock().unwrap_or_else(|e| e.into_inner());
        if self.read_index().contains_key(&record.user_id) {
            return Err(StoreError::AlreadyExists(record.user_id));
        }
        file.write_all(encode_line(&record).as_bytes())?;
        file.sync_data()?;
        self.index
            .write()
            .unwrap_or_else(|e| e.into_inner())
            .insert(record.user_id.clone(), record);
        Ok(())
    }

    pub fn get_account(&self, user_id: &UserId) -> Result<AccountRecord, StoreError> {
        self.read_index()
            .get(user_id)
            .cloned()
            .ok_or_else(|| StoreError::NotFound(user_id.clone()))
    }

    pub fn contains(&self, user_id: &UserId) -> bool {
        self.read_index().contains_key(user_id)
    }

    pub fn len(&self) -> usize {
        self.read_index().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn read_index(&self) -> std::sync::RwLockReadGuard<'_, HashMap<UserId, AccountRecord>> {
        self.index.read().unwrap_or_else(|e| e.into_inner())
    }
}

#[cfg(unix)]
fn sync_parent_dir(path: &Path) -> io::Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => File::open(dir)?.sync_all(),
        _ => Ok(()),
    }
}

#[cfg(not(unix))]
fn sync_parent_dir(_path: &Path) -> io::Result<()> {
    Ok(())
}
