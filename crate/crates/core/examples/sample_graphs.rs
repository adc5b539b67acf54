//! Sample pairings and simple 5-regular graphs and look at their short cycles.
//!
//! cargo run --release --example sample_graphs -- [n] [samples] [seed]

use nzflow::pairing::{cycle_counts, mc_cycle_stats, sample_pairing, sample_simple_regular};

fn main() -> nzflow::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(200);
    let samples: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(2000);
    let seed: u64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(1);

    let p = sample_pairing(n, seed)?;
    let g = p.to_multigraph();
    let c = cycle_counts(&g, 5)?;
    println!("one pairing on {n} vertices: {} edges, simple = {}", g.num_edges(), g.is_simple());
    for k in 1..=5 {
        println!("  X_{k} = {}", c.get(k));
    }

    let stats = mc_cycle_stats(n, samples, seed)?;
    println!("over {samples} pairings:");
    println!("  mean X_1 = {:.4} +- {:.4}  (limit 2)", stats.loops.mean, stats.loops.stderr);
    println!("  mean X_2 = {:.4} +- {:.4}  (limit 4)", stats.double_edges.mean, stats.double_edges.stderr);
    println!("  P(simple) = {:.5} +- {:.5}  (limit e^-6 = {:.5})", stats.simple.mean, stats.simple.stderr, (-6f64).exp());

    let s = sample_simple_regular(n, seed, 100_000)?;
    println!("a simple graph: {} edges, simple = {}", s.to_multigraph().num_edges(), s.to_multigraph().is_simple());
    println!("JSON form of a pairing on 2 vertices: {}", serde_json::to_string(&sample_pairing(2, seed)?)?);
    Ok(())
}
