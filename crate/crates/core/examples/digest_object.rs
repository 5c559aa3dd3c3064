// Digest an object, the way a client turns a photo or song into a password.
//
// `cargo run --example digest_object -- path/to/file` digests a file;
// without arguments it digests a few in-memory objects.

use std::error::Error;
use std::io::Cursor;

use objauth::digest::{digest_file, digest_reader};
use objauth::{object_digest, Digest, ObjectHasher};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let object = b"holiday-photo bytes would go here";
    let whole = object_digest(object);
    println!("one shot   {whole}");

    // the same digest, fed in pieces as they arrive
    let mut hasher = ObjectHasher::new();
    for chunk in object.chunks(5) {
        hasher.update(chunk);
    }
    assert_eq!(hasher.finish(), whole);

    let (streamed, len) = digest_reader(Cursor::new(&object[..]))?;
    assert_eq!((streamed, len), (whole, object.len() as u64));
    println!("streamed   {streamed} ({len} bytes)");

    // the hex form is what the hash scheme sends; parsing is case-insensitive
    let parsed: Digest = whole.to_hex().to_uppercase().parse()?;
    assert_eq!(parsed, whole);

    let mut flipped = object.to_vec();
    flipped[0] ^= 1;
    println!("one bit off {}", object_digest(&flipped));
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    match std::env::args().nth(1) {
        Some(path) => {
            println!("{}  {path}", digest_file(&path)?);
            Ok(())
        }
        None => run_example(),
    }
}
