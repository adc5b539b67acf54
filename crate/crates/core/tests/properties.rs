use proptest::prelude::*;

use nzflow::landscape::{self as land, ZVector};
use nzflow::moments::{self, IndexVector};
use nzflow::numbers::LogNumber;
use nzflow::orientation::{self as orient, FindOutcome};
use nzflow::pairing::{self, Pairing};

fn index_vector(n: usize) -> impl Strategy<Value = IndexVector> {
    let half = n / 2;
    (0..=half).prop_flat_map(move |k| {
        let m = half - k;
        (Just(k), 0..=k, 0..=m, 0..=m, 0..=k).prop_map(|(k, a, b, c, d)| IndexVector::new(k, a, b, c, d))
    })
}

fn j_point() -> impl Strategy<Value = ZVector> {
    (0.0..=0.5f64, 0.0..=1.0f64, 0.0..=1.0f64, 0.0..=1.0f64, 0.0..=1.0f64)
        .prop_map(|(z, a, b, c, d)| ZVector::new(z, a * z, b * (0.5 - z), c * (0.5 - z), d * z))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn second_moment_term_swap_symmetry((n, iv) in (1usize..15).prop_flat_map(|h| (Just(2 * h), index_vector(2 * h)))) {
        prop_assert!(iv.is_member(n));
        let a = moments::second_moment_term(n, &iv).unwrap();
        let b = moments::second_moment_term(n, &iv.swapped()).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a >= num_rational::BigRational::from_integer(0.into()));
    }

    #[test]
    fn count_matches_brute_force(seed in any::<u64>(), half in 1usize..=3) {
        let p = pairing::sample_pairing(2 * half, seed).unwrap();
        prop_assert_eq!(orient::count_valid(&p).unwrap(), orient::count_valid_brute_force(&p));
    }

    #[test]
    fn found_orientations_are_valid_both_ways(seed in any::<u64>()) {
        let p = pairing::sample_pairing(30, seed).unwrap();
        if let FindOutcome::Found { orientation, .. } = orient::find_valid(&p, 200_000, seed) {
            let rep = orient::validate(&p, &orientation).unwrap();
            prop_assert!(rep.valid);
            prop_assert_eq!(rep.in_vertices(), 15);
            prop_assert!(orient::validate(&p, &orientation.reversed()).unwrap().valid);
            prop_assert_eq!(orient::in_out_point_census(&p, &orientation).unwrap(), (75, 75));
        }
    }

    #[test]
    fn pairing_json_round_trip(seed in any::<u64>(), half in 1usize..20) {
        let p = pairing::sample_pairing(2 * half, seed).unwrap();
        let back: Pairing = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        prop_assert_eq!(&back, &p);
        let g = p.to_multigraph();
        prop_assert!((0..g.n()).all(|v| g.degree(v) == 5));
        let back: pairing::MultiGraph = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn f_swap_symmetry_and_bound(p in j_point()) {
        prop_assert!(p.is_member());
        let (a, b) = (land::f_of(&p).unwrap(), land::f_of(&p.swapped()).unwrap());
        prop_assert!((a - b).abs() < 1e-12);
        prop_assert!(a <= land::f_max() + 1e-12);
        let bv = land::b_of(&p).unwrap();
        prop_assert!((-1e-12..=2.5 + 1e-12).contains(&bv));
    }

    #[test]
    fn case2_reduces_to_f_bar(a in 0.0..=0.5f64, c in 0.0..=0.5f64) {
        let full = land::f_of(&ZVector::new(0.5, a, 0.0, 0.0, c)).unwrap();
        prop_assert!((full - land::f_bar(a, c).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn log_numbers_track_floats(x in -1e6..1e6f64, y in -1e6..1e6f64) {
        let (lx, ly) = (LogNumber::from_f64(x), LogNumber::from_f64(y));
        let close = |a: f64, b: f64, scale: f64| (a - b).abs() <= 1e-9 * scale.max(1e-300);
        prop_assert!(close((lx * ly).to_f64(), x * y, (x * y).abs()));
        prop_assert!(close((lx + ly).to_f64(), x + y, x.abs() + y.abs()));
        prop_assert!(close((lx - ly).to_f64(), x - y, x.abs() + y.abs()));
    }
}

#[test]
fn pairing_sampler_is_uniform_at_n2() {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    let all = pairing::all_pairings(2).unwrap();
    let index = pairing::pairing_index(&all);
    let draws = 189_000usize;
    let mut counts = vec![0usize; all.len()];
    for i in 0..draws {
        let p = pairing::sample_pairing(2, nzflow::seed::derive_indexed(77, "uniformity", i as u64)).unwrap();
        counts[index[&p.canonical()]] += 1;
    }
    let expected = draws as f64 / all.len() as f64;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let p_value = 1.0 - ChiSquared::new((all.len() - 1) as f64).unwrap().cdf(chi2);
    assert!(p_value > 1e-4, "chi2 {chi2}, p {p_value}");
}
