//! Cycle-count constants, the variance series and simulated joint moments.
//!
//! cargo run --release --example conditioning -- [n] [trials] [seed]

use nzflow::conditioning::*;
use nzflow::numbers::rational_to_f64;

fn main() -> nzflow::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(12);
    let trials: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(5000);
    let seed: u64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(1);

    let samples = sample_joint(n, trials, 4, seed)?;
    println!("{:>2} {:>10} {:>10} {:>10} {:>18} {:>10}", "k", "lambda", "mu", "delta", "E(Y X_k)/E Y (MC)", "exact");
    for row in cycle_moment_table(6, Some(&samples))? {
        let mc = row.mc.map(|m| format!("{:.4} +- {:.4}", m.estimate, m.stderr)).unwrap_or_default();
        let exact = row.finite_n.map(|x| format!("{x:.4}")).unwrap_or_default();
        println!("{:>2} {:>10} {:>10} {:>10} {mc:>18} {exact:>10}", row.k, row.lambda, row.mu, row.delta);
    }
    let pair = samples.factorial_moment(1, 2);
    println!(
        "E(Y X_1(X_1-1))/E Y = {:.4} +- {:.4}, exact at n={n}: {:.4}, limit 2.56",
        pair.estimate,
        pair.stderr,
        rational_to_f64(&loop_pair_moment_exact(n)?)
    );
    for k in [1, 2, 5, 10, 50] {
        println!("exp(sum_(j<={k}) lambda_j delta_j^2) = {:.12}", ssc_constant(k)?);
    }
    Ok(())
}
