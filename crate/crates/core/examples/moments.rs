//! First and second moments of Y, exact and asymptotic, and their ratio.
//!
//! cargo run --release --example moments

use nzflow::moments::*;
use nzflow::numbers::format_rational;

fn main() -> nzflow::Result<()> {
    for n in [2, 4, 6] {
        println!(
            "n = {n}: E Y = {}, E Y^2 = {}",
            format_rational(&first_moment_exact(n)?),
            format_rational(&second_moment_exact(n)?)
        );
    }
    println!();
    println!("{:>5} {:>14} {:>14} {:>12} {:>12}", "n", "log10 E Y", "log10 E Y^2", "EY/asym", "ratio");
    for n in [10, 20, 50, 100, 200, 400] {
        let first = first_moment_log(n)?;
        let second = second_moment_log(n)?;
        println!(
            "{n:>5} {:>14.6} {:>14.6} {:>12.8} {:>12.8}",
            first.log10_abs(),
            second.log10_abs(),
            (first / first_moment_asymptotic(n)?).to_f64(),
            moment_ratio(n)?
        );
    }
    println!("limit 5/sqrt(21) = {:.8}", ratio_limit());
    println!("|I(400)| = {}", index_set_size(400)?);
    Ok(())
}
