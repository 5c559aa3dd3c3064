// The account store on its own: salted records in an append-only file.

use std::error::Error;

use objauth::{
    object_digest, verify_credentials, AccountRecord, AccountStore, PasswordString, StoreError,
    UserId,
};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let dir = tempfile::tempdir()?;
    let path = dir.path().join("accounts.jsonl");

    let song = b"a few seconds of a favourite song";
    let password = PasswordString::from_digest(&object_digest(song));
    {
        let store = AccountStore::open(&path)?;
        store.create_account(AccountRecord::create(UserId::new("carol")?, &password)?)?;
        let again = store.create_account(AccountRecord::create(UserId::new("carol")?, &password)?);
        assert!(matches!(again, Err(StoreError::AlreadyExists(_))));
    }

    // one JSON object per line; no plaintext, only the salted hash
    print!("{}", std::fs::read_to_string(&path)?);

    let store = AccountStore::open(&path)?;
    let record = store.get_account(&UserId::new("carol")?)?;
    assert!(verify_credentials(&password, &record));
    let wrong = PasswordString::from_digest(&object_digest(b"a different song"));
    assert!(!verify_credentials(&wrong, &record));
    println!("reopened: {} account(s), carol verifies", store.len());
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
