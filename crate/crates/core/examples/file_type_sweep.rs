// Digest time by content type.
//
// `cargo run --release --example file_type_sweep -- a.jpg b.mp3 c.mp4`
// times your own files (they must be the same size); without arguments it
// uses synthetic 1 MB fixtures.

use std::error::Error;

use objauth::bench::sweep::load_fixtures;
use objauth::bench::{content_fixtures, sweep_file_type};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    report(&content_fixtures(1_000_000))
}

fn report(fixtures: &[(String, Vec<u8>)]) -> Result<(), Box<dyn Error>> {
    println!("{:<12} {:>10} {:>10} {:>10}", "fixture", "mean ms", "std ms", "min ms");
    for row in sweep_file_type(fixtures, 50)? {
        println!("{:<12} {:>10.3} {:>10.3} {:>10.3}", row.name, row.mean_ms, row.std_ms, row.min_ms);
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    let paths: Vec<String> = std::env::args().skip(1).collect();
    if paths.is_empty() {
        run_example()
    } else {
        report(&load_fixtures(&paths)?)
    }
}
