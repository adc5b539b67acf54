//! Finds valid orientations of random simple 5-regular graphs.
//!
//! cargo run --release --example find_orientation -- [n] [instances] [seed]

use std::time::Instant;

use nzflow::orientation::{find_valid, validate, FindOutcome, DEFAULT_BUDGET};
use nzflow::pairing::sample_simple_regular;
use nzflow::seed;

fn main() -> nzflow::Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).map(|a| a.parse().expect("integer argument")).collect();
    let n = *args.first().unwrap_or(&10_000) as usize;
    let instances = *args.get(1).unwrap_or(&5);
    let master = *args.get(2).unwrap_or(&2024);

    let mut successes = 0;
    for i in 0..instances {
        let t0 = Instant::now();
        let p = sample_simple_regular(n, seed::derive_indexed(master, "graph", i), 1_000_000)?;
        let sampled = t0.elapsed();
        let out = find_valid(&p, DEFAULT_BUDGET, seed::derive_indexed(master, "search", i));
        match &out {
            FindOutcome::Found { orientation, steps, restarts } => {
                let report = validate(&p, orientation)?;
                assert!(report.valid);
                successes += 1;
                println!(
                    "instance {i}: valid orientation, {} in-vertices, {steps} steps, {restarts} restarts, sample {:.2?}, total {:.2?}",
                    report.in_vertices(),
                    sampled,
                    t0.elapsed()
                );
            }
            FindOutcome::Failed { best_potential, steps, .. } => {
                println!("instance {i}: failed, best potential {best_potential} after {steps} steps");
            }
        }
    }
    println!("{successes}/{instances} instances solved at n = {n}");
    Ok(())
}
