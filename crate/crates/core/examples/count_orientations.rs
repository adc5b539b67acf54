//! Exact counts of valid orientations: every pairing on 2 vertices, then a
//! few random pairings.
//!
//! cargo run --release --example count_orientations -- [n] [samples]

use std::collections::BTreeMap;

use nzflow::moments::first_moment_exact;
use nzflow::orientation::count_valid;
use nzflow::pairing::{all_pairings, sample_pairing};

fn main() -> nzflow::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(12);
    let samples: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(8);

    let mut hist = BTreeMap::new();
    let mut total = 0;
    for p in all_pairings(2)? {
        let y = count_valid(&p)?;
        *hist.entry(y).or_insert(0) += 1;
        total += y;
    }
    println!("n = 2: distribution of Y over all 945 pairings");
    for (y, c) in &hist {
        println!("  Y = {y:>2}: {c} pairings");
    }
    println!("  mean {total}/945, E Y = {}", first_moment_exact(2)?);

    println!("n = {n}:");
    for seed in 0..samples {
        let p = sample_pairing(n, seed)?;
        println!("  seed {seed}: Y = {}", count_valid(&p)?);
    }
    println!("  E Y = {:.3}", nzflow::numbers::rational_to_f64(&first_moment_exact(n)?));
    Ok(())
}
