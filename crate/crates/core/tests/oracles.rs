//! Cross-checks between independent routes to the same quantities.

use num_rational::BigRational;
use nzflow::conditioning as cond;
use nzflow::landscape::{self as land, ZVector};
use nzflow::moments;
use nzflow::numbers::{rational_to_f64, rational_to_log};
use nzflow::pairing;

#[test]
fn exact_and_log_moments_agree_up_to_40() {
    for n in (2..=40).step_by(2) {
        let e1 = rational_to_log(&moments::first_moment_exact(n).unwrap());
        assert!(moments::first_moment_log(n).unwrap().rel_err(&e1) < 1e-9, "first n={n}");
    }
    for n in [2usize, 4, 10, 20, 30, 36, 40] {
        let e2 = rational_to_log(&moments::second_moment_exact(n).unwrap());
        assert!(moments::second_moment_log(n).unwrap().rel_err(&e2) < 1e-9, "second n={n}");
        let r = rational_to_f64(&moments::moment_ratio_exact(n).unwrap());
        assert!((moments::moment_ratio(n).unwrap() / r - 1.0).abs() < 1e-9);
    }
}

#[test]
fn precision_cross_check_at_50() {
    let exact = rational_to_log(&moments::second_moment_exact_capped(50, 50).unwrap());
    assert!(moments::second_moment_log(50).unwrap().rel_err(&exact) < 1e-9);
    assert!(moments::second_moment_log_direct(50).unwrap().rel_err(&exact) < 1e-9);
}

#[test]
fn direct_and_collapsed_log_sums_agree() {
    for n in [60usize, 80] {
        let a = moments::second_moment_log(n).unwrap();
        let b = moments::second_moment_log_direct(n).unwrap();
        assert!(a.rel_err(&b) < 1e-10, "n={n}");
    }
}

#[test]
fn factorial_second_moment_at_n2() {
    let f = moments::factorial_second_moment_exact(2).unwrap();
    assert_eq!(f, BigRational::new(2960.into(), 63.into()));
}

#[test]
fn first_moment_asymptotics() {
    let ratio = |n| (moments::first_moment_log(n).unwrap() / moments::first_moment_asymptotic(n).unwrap()).to_f64();
    assert!((ratio(100) - 1.0).abs() < 0.02);
    let gaps: Vec<f64> = [20, 40, 80, 160].iter().map(|&n| (ratio(n) - 1.0).abs()).collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    let tiny = moments::first_moment_asymptotic(2).unwrap().to_f64();
    assert!((tiny - 6.9877).abs() < 1e-4);
}

#[test]
fn second_moment_asymptotics() {
    let ratio = |n| (moments::second_moment_log(n).unwrap() / moments::second_moment_asymptotic(n).unwrap()).to_f64();
    assert!((ratio(200) - 1.0).abs() < 0.05);
    assert!((ratio(400) - 1.0).abs() < 0.03);
    let c = moments::second_moment_asymptotic(2).unwrap().to_f64() / (25.0f64 / 8.0).powi(2);
    assert!((c - 5.455447).abs() < 1e-6);
    assert!((c - 1562.5 / 82031.25f64.sqrt()).abs() < 1e-12);
}

#[test]
fn index_set_counts() {
    assert_eq!(moments::index_set_size(50).unwrap(), moments::enumerate_index_set(50).unwrap().count() as u64);
}

#[test]
fn mc_first_moment_at_8() {
    let est = moments::mc_first_moment(8, 20_000, 3).unwrap();
    let exact = rational_to_f64(&moments::first_moment_exact(8).unwrap());
    assert!(est.z_score(exact) < 4.0, "{est:?} vs {exact}");
}

#[test]
fn joint_moments_match_finite_n_counts() {
    let s = cond::sample_joint(12, 10_000, 4, 8).unwrap();
    for k in 1..=4 {
        let est = s.joint_moment(k);
        let exact = rational_to_f64(&cond::joint_moment_exact(12, k).unwrap());
        assert!((est.estimate - exact).abs() < 4.0 * est.stderr, "k={k}: {est:?} vs {exact}");
    }
    let pair = s.factorial_moment(1, 2);
    let exact = rational_to_f64(&cond::loop_pair_moment_exact(12).unwrap());
    assert!((pair.estimate - exact).abs() < 3.0 * pair.stderr, "{pair:?} vs {exact}");
}

#[test]
fn joint_moments_tend_to_mu() {
    for k in 1..=6 {
        let exact = rational_to_f64(&cond::joint_moment_exact(100_000, k).unwrap());
        let mu = rational_to_f64(&cond::mu_k(k).unwrap());
        assert!((exact / mu - 1.0).abs() < 1e-3, "k={k}");
    }
}

#[test]
fn q_identity_and_series_bounds() {
    for k in 1..=20 {
        let mut s = BigRational::from_integer(0.into());
        for i in 0..=k / 2 {
            let a = BigRational::from_integer(cond::a_i(k, i).unwrap().into());
            s += a * num_traits::pow(BigRational::new(9.into(), 4.into()), i);
        }
        assert_eq!(s, cond::q_even_part(k));
    }
    let lim = moments::ratio_limit();
    let mut prev = 0.0;
    for k in 1..=30 {
        let v = cond::ssc_constant(k).unwrap();
        // terms drop below double resolution after k = 16 or so
        assert!(if k <= 12 { v > prev } else { v >= prev } && v <= lim + 1e-15);
        assert!(lim - v < (4.0f64 / 25.0).powi(k as i32).max(1e-15));
        prev = v;
    }
}

#[test]
fn simple_acceptance_rate_at_500() {
    let est = pairing::mc_simple_probability(500, 200_000, 6).unwrap();
    assert!(est.z_score((-6.0f64).exp()) < 3.0, "{est:?}");
}

#[test]
fn printed_polynomials() {
    // P7 at z = 1/4 factors as -(15/16)(20 z00 - 1)(96 z00^2 - 84 z00 - 1)
    for z00 in [0.0, 0.013, 0.05, 0.11, 0.2] {
        let f = -0.9375 * (20.0 * z00 - 1.0) * (96.0 * z00 * z00 - 84.0 * z00 - 1.0);
        assert!((land::p7(0.25, z00) - f).abs() < 1e-12);
    }
    for (a, b, c) in [(13068.0, -6534.0, -109.0), (96.0, -84.0, -1.0)] {
        let (r1, r2) = land::quadratic_roots(a, b, c).unwrap();
        assert!(!(0.0..=0.5).contains(&r1) && !(0.0..=0.5).contains(&r2));
    }
    // P01 on the symmetric slice through z = 1/4, z00 = z11 = 1/20
    for x in [0.01, 0.05, 0.1, 0.2] {
        let p01 = land::stationary_polys(&ZVector::new(0.25, 0.05, x, x, 0.05))[2];
        assert!((p01 - (20.0 * x - 1.0) * (24.0 * x - 23.0) / 20.0).abs() < 1e-12);
    }
}

#[test]
fn taylor_decay() {
    let r2 = land::taylor_ratio(1e-2, 100, 2).unwrap();
    let r3 = land::taylor_ratio(1e-3, 100, 2).unwrap();
    assert!(r2 < 200.0 && r3 < 200.0);
    let decay = r3 / r2;
    assert!((1.0 / 3.0..=3.0).contains(&decay), "{decay}");
    let hb = land::hessian_at(&ZVector::new(0.2, 0.03, 0.1, 0.07, 0.12)).unwrap();
    assert!(hb.asymmetry() < 1e-12 && hb.raw_asymmetry < 1e-7);
}

#[test]
fn boundary_values() {
    let rep = land::boundary_report(1);
    assert!((rep.computed_value - (5.0 / 8f64.sqrt()).ln()).abs() < 1e-12);
    assert!((rep.computed_value - rep.mirror_value).abs() < 1e-12);
    assert!((rep.printed_value - rep.computed_value).abs() > 1.0);
    assert_eq!(rep.diagonal_stationary.len(), 1);
    let d = rep.diagonal_stationary[0];
    assert!(d.is_max && (d.t - 0.25).abs() < 1e-8);
    assert!((d.value - (4.5 * 2f64.ln() - 1.5 * 5f64.ln())).abs() < 1e-12);
    assert!((land::f_bar_diagonal_derivative(0.25)).abs() < 1e-15);
    assert!(rep.below_interior_max);
}
