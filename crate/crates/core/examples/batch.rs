//! A seeded sweep written as CSV and summarized, the same as
//! `dyncons batch` followed by `dyncons report`.
//!
//!     cargo run --release --example batch -- [family] [count]

use dyncons::harness::{batch, summarize, write_csv, BatchSpec, Family};

fn main() {
    let mut args = std::env::args().skip(1);
    let family: Family = args.next().as_deref().unwrap_or("stable_window").parse().unwrap();
    let count: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(50);

    let seeds: Vec<u64> = (0..count).collect();
    let entries = batch(&BatchSpec::new(family), &seeds).unwrap();
    let rows: Vec<_> = entries.iter().map(|e| e.row.clone()).collect();

    let mut csv = Vec::new();
    write_csv(&rows[..rows.len().min(5)], &mut csv).unwrap();
    print!("{}", String::from_utf8(csv).unwrap());
    println!("...\n");
    print!("{}", summarize(&rows));
    for e in entries.iter().filter(|e| !e.failures.is_empty()) {
        println!("seed {}: {:?}", e.row.seed, e.failures);
    }
}
