//! The exponent f on J: its maximiser, the quadratic form there and the
//! boundary.
//!
//! cargo run --release --example landscape -- [starts] [seed]

use nzflow::landscape::*;

fn main() -> nzflow::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let starts: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(50);
    let seed: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1);

    let t = ZVector::tilde();
    println!("f(z~) = {:.12}, log(25/8) = {:.12}", f_of(&t)?, f_max());
    println!("grad f(z~) = {:?}", grad_f(&t)?);

    for c in maximize_f(starts, 1e-6, seed).iter().take(4) {
        println!("{:?} value {:.10} hits {} at {:?}", c.kind, c.value, c.hits, c.point.to_array());
    }

    let hb = hessian_at(&t)?;
    println!("B(z~) by finite differences, max deviation from exact {:.2e}", hb.max_abs_diff(&HessianB::exact()));
    let s = spectrum_b();
    println!("eigenvalues {:?}", s.eigenvalues);
    println!("det B = {}", s.determinant);
    println!("Laplace coefficient {:.10} (25/sqrt 21 = {:.10})", laplace_coefficient(), 25.0 / 21f64.sqrt());

    let b = boundary_report(seed);
    println!("f(0,0,1/2,1/2,0) = {:.6} (log(5/8) would be {:.6})", b.computed_value, b.printed_value);
    for d in &b.diagonal_stationary {
        println!("f_bar(t,t) stationary at t = {:.8}, value {:.6}, max = {}", d.t, d.value, d.is_max);
    }
    println!("max f_bar = {:.6} at {:?}", b.f_bar_max, b.f_bar_argmax);
    Ok(())
}
