//! Acceptance criteria 1-13. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::time::{Duration, Instant};

use num_rational::BigRational;
use nzflow::conditioning as cond;
use nzflow::landscape::{self as land, ZVector};
use nzflow::moments;
use nzflow::numbers::rational_to_f64;
use nzflow::orientation::{self as orient, FindOutcome};
use nzflow::pairing;

const SEED: u64 = 20_240_501;

// criterion 1-2
const ANCHOR_RUNTIME: Duration = Duration::from_secs(1);
// criterion 3
const MC_FIRST_N: usize = 8;
const MC_FIRST_TRIALS: usize = 100_000;
const MC_FIRST_SIGMAS: f64 = 4.0;
// criterion 4
const RATIO_NS: [usize; 4] = [50, 100, 200, 400];
const RATIO_FINAL_REL: f64 = 0.02;
// criterion 5
const GRAD_TOL: f64 = 1e-10;
const POLY_TOL: f64 = 1e-12;
// criterion 6
const STARTS: usize = 100;
const POINT_TOL: f64 = 1e-6;
const VALUE_TOL: f64 = 1e-9;
const SCAN_SAMPLES: usize = 1_000_000;
// criterion 7
const HESSIAN_TOL: f64 = 1e-6;
const EIGEN_TOL: f64 = 1e-8;
const EIGEN_CEILING: f64 = -2.6;
// criterion 8
const LAPLACE_REL: f64 = 1e-10;
// criterion 9
const IDENTITY_K: usize = 30;
const CENSUS_K: usize = 12;
const SERIES_K: usize = 50;
const SERIES_TOL: f64 = 1e-10;
// criterion 10
const FD_POINTS: usize = 1000;
const FD_STEP: f64 = 1e-6;
const FD_MARGIN: f64 = 1e-3;
const FD_TOL: f64 = 1e-6;
// criterion 11
const CYCLE_N: usize = 1000;
const CYCLE_SAMPLES: usize = 20_000;
const SIMPLE_TRIALS: usize = 1_000_000;
const CYCLE_SIGMAS: f64 = 3.0;
// criterion 12
const JOINT_N: usize = 12;
const JOINT_TRIALS: usize = 10_000;
const JOINT_REL: f64 = 0.10;
const JOINT_SIGMAS: f64 = 3.0;
// criterion 13
const SOLVER_N: usize = 10_000;
const SOLVER_INSTANCES: usize = 100;
const SOLVER_RUNTIME: Duration = Duration::from_secs(30 * 60);

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn first_moment_anchor() -> Outcome {
    let t = Instant::now();
    let all = pairing::all_pairings(2).map_err(|e| e.to_string())?;
    let total: u64 = all.iter().map(|p| orient::count_valid(p).unwrap()).sum();
    let mean = BigRational::new(total.into(), (all.len() as u64).into());
    let exact = moments::first_moment_exact(2).unwrap();
    let el = t.elapsed();
    ensure(
        all.len() == 945 && mean == exact && mean == BigRational::new(400.into(), 63.into()) && el < ANCHOR_RUNTIME,
        format!("{} pairings, mean Y = {mean}, E Y = {exact}, {el:.2?}", all.len()),
    )
}

fn second_moment_anchor() -> Outcome {
    let t = Instant::now();
    let all = pairing::all_pairings(2).unwrap();
    let ys: Vec<u64> = all.iter().map(|p| orient::count_valid(p).unwrap()).collect();
    let sq: u64 = ys.iter().map(|y| y * y).sum();
    let fall: u64 = ys.iter().map(|y| y * y.saturating_sub(1)).sum();
    let m = BigRational::from_integer(945.into());
    let (e_sq, e_fall) = (BigRational::from_integer(sq.into()) / &m, BigRational::from_integer(fall.into()) / &m);
    let sum = moments::second_moment_exact(2).unwrap();
    let el = t.elapsed();
    ensure(
        sum == e_sq && sum != e_fall && el < ANCHOR_RUNTIME,
        format!("sum over I = {sum} = E[Y^2] (E[Y(Y-1)] = {e_fall}), {el:.2?}"),
    )
}

fn mc_first_moment() -> Outcome {
    let est = moments::mc_first_moment(MC_FIRST_N, MC_FIRST_TRIALS, SEED).unwrap();
    let exact = rational_to_f64(&moments::first_moment_exact(MC_FIRST_N).unwrap());
    let z = est.z_score(exact);
    ensure(
        z <= MC_FIRST_SIGMAS,
        format!("n={MC_FIRST_N}: mean {:.4} +- {:.4} vs E Y {exact:.4} ({z:.2} se)", est.mean, est.stderr),
    )
}

fn ratio_convergence() -> Outcome {
    let target = moments::ratio_limit();
    let errs: Vec<f64> = RATIO_NS.iter().map(|&n| (moments::moment_ratio(n).unwrap() - target).abs()).collect();
    let decreasing = errs.windows(2).all(|w| w[1] < w[0]);
    let last = errs[errs.len() - 1] / target;
    ensure(
        decreasing && last < RATIO_FINAL_REL,
        format!(
            "|ratio - 5/sqrt21| at n={RATIO_NS:?}: [{}]; final relative {last:.2e}",
            errs.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn stationary_point() -> Outcome {
    let t = ZVector::tilde();
    let g = land::grad_f(&t).unwrap().iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let p = land::stationary_polys(&t).iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let p6 = land::p6(&t).abs();
    let p7 = land::p7(t.z, t.z00).abs();
    let factor = (20.0 * t.z00 - 1.0).abs();
    ensure(
        g < GRAD_TOL && p < POLY_TOL && p6 < POLY_TOL && p7 < POLY_TOL && factor < POLY_TOL,
        format!("|grad| {g:.1e}, |P| {p:.1e}, |P6| {p6:.1e}, |P7(1/4,1/20)| {p7:.1e}"),
    )
}

fn global_maximum() -> Outcome {
    let fmax = land::f_max();
    let cands = land::maximize_f(STARTS, POINT_TOL, SEED);
    let best = &cands[0];
    let dist = best.point.distance(&ZVector::tilde());
    let top = cands.iter().map(|c| c.value).fold(f64::NEG_INFINITY, f64::max);
    let (_, scan) = land::global_scan(SCAN_SAMPLES, SEED);
    let b = land::boundary_report(SEED);
    ensure(
        dist < POINT_TOL && (best.value - fmax).abs() < VALUE_TOL && top <= fmax + VALUE_TOL && scan <= fmax + VALUE_TOL
            && b.below_interior_max,
        format!(
            "best at distance {dist:.1e}, value gap {:.1e}; scan max {scan:.6}; boundary max {:.6} (f_bar at {:?})",
            (best.value - fmax).abs(),
            b.f_bar_max.max(b.computed_value),
            b.f_bar_argmax
        ),
    )
}

fn hessian_suite() -> Outcome {
    let hb = land::hessian_at(&ZVector::tilde()).unwrap();
    let diff = hb.max_abs_diff(&land::HessianB::exact());
    let s = land::spectrum_b();
    let ev = s.eigenvalues.iter().zip(land::eigenvalues_closed_form()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let det_ok = s.determinant == BigRational::new((-328125).into(), 4.into());
    ensure(
        diff < HESSIAN_TOL && ev < EIGEN_TOL && det_ok && s.eigenvalues.iter().all(|&e| e < EIGEN_CEILING),
        format!("|B - exact| {diff:.1e}, eigenvalue error {ev:.1e}, det {}", s.determinant),
    )
}

fn laplace() -> Outcome {
    let c = land::laplace_coefficient();
    let r1 = (c / (25.0 / 21f64.sqrt()) - 1.0).abs();
    let r2 = (c / 5.0 / moments::ratio_limit() - 1.0).abs();
    ensure(r1 < LAPLACE_REL && r2 < LAPLACE_REL, format!("coefficient {c:.10}, rel errors {r1:.1e}, {r2:.1e}"))
}

fn conditioning_identities() -> Outcome {
    for k in 1..=IDENTITY_K {
        let lam = BigRational::new(num_bigint::BigInt::from(4).pow(k as u32), (2 * k).into());
        if cond::lambda_k(k).unwrap() != lam
            || cond::delta_k(k).unwrap() != cond::delta_k_closed(k).unwrap()
            || cond::mu_k(k).unwrap() != cond::mu_k_from_a(k).unwrap()
        {
            return Err(format!("identity fails at k={k}"));
        }
    }
    for k in 1..=CENSUS_K {
        let census = cond::cycle_orientation_census(k).unwrap();
        if census.iter().enumerate().any(|(i, &c)| cond::a_i(k, i).unwrap() != c.into()) {
            return Err(format!("a_i census fails at k={k}"));
        }
    }
    let s = cond::ssc_constant(SERIES_K).unwrap();
    let gap = (s - moments::ratio_limit()).abs();
    ensure(gap < SERIES_TOL, format!("k<={IDENTITY_K} exact, census k<={CENSUS_K}, series gap {gap:.1e}"))
}

fn gradient_property() -> Outcome {
    let e = land::grad_fd_max_error(FD_POINTS, FD_STEP, FD_MARGIN, SEED);
    ensure(e < FD_TOL, format!("max |analytic - central difference| = {e:.2e} over {FD_POINTS} points"))
}

fn cycle_statistics() -> Outcome {
    let st = pairing::mc_cycle_stats(CYCLE_N, CYCLE_SAMPLES, SEED).unwrap();
    let simple = pairing::mc_simple_probability(CYCLE_N, SIMPLE_TRIALS, SEED).unwrap();
    let p = (-6.0f64).exp();
    let (z1, z2, zs) = (st.loops.z_score(2.0), st.double_edges.z_score(4.0), simple.z_score(p));
    ensure(
        z1 <= CYCLE_SIGMAS && z2 <= CYCLE_SIGMAS && zs <= CYCLE_SIGMAS,
        format!(
            "X1 {:.4} ({z1:.2} se), X2 {:.4} ({z2:.2} se), P(simple) {:.5} vs {p:.5} ({zs:.2} se)",
            st.loops.mean, st.double_edges.mean, simple.mean
        ),
    )
}

fn joint_moments() -> Outcome {
    let s = cond::sample_joint(JOINT_N, JOINT_TRIALS, 2, SEED).unwrap();
    let mut parts = vec![];
    let mut ok = true;
    for k in 1..=2 {
        let est = s.joint_moment(k);
        let mu = rational_to_f64(&cond::mu_k(k).unwrap());
        ok &= est.within(mu, JOINT_REL, JOINT_SIGMAS);
        parts.push(format!("k={k}: {:.4} +- {:.4} vs {mu:.4}", est.estimate, est.stderr));
    }
    ensure(ok, parts.join("; "))
}

fn solver_evidence() -> Outcome {
    let t = Instant::now();
    let mut solved = 0;
    let mut max_steps = 0;
    for i in 0..SOLVER_INSTANCES {
        let seed = nzflow::seed::derive_indexed(SEED, "acceptance/solver", i as u64);
        let p = pairing::sample_simple_regular(SOLVER_N, seed, 100_000).unwrap();
        if let FindOutcome::Found { orientation, steps, .. } = orient::find_valid(&p, orient::DEFAULT_BUDGET, seed) {
            if orient::validate(&p, &orientation).unwrap().valid {
                solved += 1;
                max_steps = max_steps.max(steps);
            }
        }
    }
    let el = t.elapsed();
    ensure(
        solved == SOLVER_INSTANCES && el < SOLVER_RUNTIME,
        format!("{solved}/{SOLVER_INSTANCES} certified at n={SOLVER_N}, max steps {max_steps}, {el:.1?}"),
    )
}

fn main() {
    let criteria: [Criterion; 13] = [
        ("exact first-moment anchor", first_moment_anchor),
        ("second-moment anchor", second_moment_anchor),
        ("MC vs first moment", mc_first_moment),
        ("ratio convergence", ratio_convergence),
        ("stationary point", stationary_point),
        ("global maximum", global_maximum),
        ("Hessian suite", hessian_suite),
        ("Laplace coefficient", laplace),
        ("conditioning identities", conditioning_identities),
        ("gradient property", gradient_property),
        ("cycle statistics", cycle_statistics),
        ("joint moments", joint_moments),
        ("solver evidence", solver_evidence),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|v| v.parse().ok());
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        if only.is_some_and(|o| o != i + 1) {
            continue;
        }
        let t = Instant::now();
        let r = f();
        let (tag, detail) = match &r {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        failed += r.is_err() as usize;
        println!("criterion {:>2} {tag} {name}: {detail} [{:.1?}]", i + 1, t.elapsed());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
