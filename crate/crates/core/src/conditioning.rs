//! Small subgraph conditioning: the Poisson parameters of short cycle
//! counts, their shifted means in the `Y`-weighted model, and the variance
//! series that has to reproduce `lim E[Y^2]/(E Y)^2`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::numbers::{big_binomial, rational_to_f64};
use crate::orientation::count_valid;
use crate::pairing::{check_even, cycle_counts, sample_pairing};
use crate::seed;

/// Largest `n` for Monte Carlo joint moments (exact `Y` per sample).
pub const MC_MAX_N: usize = 14;

fn rat(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    BigRational::new(num.into(), den.into())
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        domain("cycle length must be at least 1")
    } else {
        Ok(())
    }
}

fn pow(base: BigRational, e: usize) -> BigRational {
    num_traits::pow(base, e)
}

/// `lambda_k = 4^k / (2k)`, the limiting mean of the number of `k`-cycles.
pub fn lambda_k(k: usize) -> Result<BigRational> {
    check_k(k)?;
    Ok(rat(BigInt::from(4).pow(k as u32), 2 * k))
}

/// Orientations of a `k`-cycle with exactly `i` vertices of in-degree 2:
/// `2 C(k, 2i)`.
pub fn a_i(k: usize, i: usize) -> Result<BigUint> {
    check_k(k)?;
    if 2 * i > k {
        return domain(format!("a_i needs 2i <= k, got k={k}, i={i}"));
    }
    Ok(big_binomial(k as u64, 2 * i as u64) * 2u32)
}

/// Brute force: tally all `2^k` orientations of a `k`-cycle by their number
/// of in-degree-2 vertices.
pub fn cycle_orientation_census(k: usize) -> Result<Vec<u64>> {
    check_k(k)?;
    if k > 24 {
        return Err(Error::SizeCap {
            what: "cycle orientation enumeration (k)",
            limit: 24,
            got: k,
        });
    }
    let mut tally = vec![0u64; k / 2 + 1];
    let mut indeg = vec![0u8; k];
    for mask in 0u32..(1 << k) {
        // edge j joins vertex j to vertex j+1; bit j set means it points forward
        indeg.iter_mut().for_each(|d| *d = 0);
        for j in 0..k {
            let head = if mask >> j & 1 == 1 { (j + 1) % k } else { j };
            indeg[head] += 1;
        }
        tally[indeg.iter().filter(|&&d| d == 2).count()] += 1;
    }
    Ok(tally)
}

/// `mu_k = (4^k + (-4/5)^k) / (2k)`.
pub fn mu_k(k: usize) -> Result<BigRational> {
    check_k(k)?;
    Ok((pow(rat(4, 1), k) + pow(rat(-4, 5), k)) / rat(2 * k, 1))
}

/// `mu_k` as `(8/5)^k / (2k) * sum_i a_i (3/2)^(2i)`.
pub fn mu_k_from_a(k: usize) -> Result<BigRational> {
    check_k(k)?;
    let mut s = BigRational::zero();
    for i in 0..=k / 2 {
        s += BigRational::from_integer(a_i(k, i)?.into()) * pow(rat(9, 4), i);
    }
    Ok(pow(rat(8, 5), k) * s / rat(2 * k, 1))
}

/// `(q(3/2) + q(-3/2)) / 2` with `q(x) = 2 (1 + x)^k`.
pub fn q_even_part(k: usize) -> BigRational {
    let q = |x: BigRational| pow(BigRational::one() + x, k) * rat(2, 1);
    (q(rat(3, 2)) + q(rat(-3, 2))) / rat(2, 1)
}

/// `delta_k = mu_k / lambda_k - 1`.
pub fn delta_k(k: usize) -> Result<BigRational> {
    Ok(mu_k(k)? / lambda_k(k)? - BigRational::one())
}

/// `(-1/5)^k`.
pub fn delta_k_closed(k: usize) -> Result<BigRational> {
    check_k(k)?;
    Ok(pow(rat(-1, 5), k))
}

/// `exp(sum_{k <= k_max} lambda_k delta_k^2)`; tends to `5/sqrt(21)`.
pub fn ssc_constant(k_max: usize) -> Result<f64> {
    check_k(k_max)?;
    let mut s = 0.0;
    for k in (1..=k_max).rev() {
        s += 0.5 * (4.0f64 / 25.0).powi(k as i32) / k as f64;
    }
    Ok(s.exp())
}

/// `E(Y X_k) / E Y` for finite `n`, exactly.
///
/// A triple (pairing, `k`-cycle, valid orientation) is built by choosing
/// the cycle, orienting it, deciding which cycle vertices are in-vertices
/// and matching the remaining `5n/2 - k` in-points to out-points. A cycle
/// vertex with cycle in-degree 0 (2) must be an in-vertex (out-vertex) and
/// chooses its special point among 3; one with cycle in-degree 1 may be
/// either, with its special point fixed by the cycle. Dividing by the
/// first-moment count leaves
///
/// ```text
/// 4^k / (2k [5n/2]_k) sum_i a_i 9^i sum_j C(k-2i, j) [n/2]_(i+j) [n/2]_(k-i-j)
/// ```
///
/// where `j` counts the in-degree-1 cycle vertices that are in-vertices.
pub fn joint_moment_exact(n: usize, k: usize) -> Result<BigRational> {
    check_even(n)?;
    check_k(k)?;
    if k > n {
        return Ok(BigRational::zero());
    }
    let falling = |x: usize, t: usize| -> BigUint { (0..t).map(|d| BigUint::from(x.saturating_sub(d))).product() };
    let half = n / 2;
    let mut inner = BigUint::zero();
    for i in 0..=k / 2 {
        let free = k - 2 * i;
        let mut ways = BigUint::zero();
        for j in 0..=free {
            ways += big_binomial(free as u64, j as u64) * falling(half, i + j) * falling(half, k - i - j);
        }
        inner += a_i(k, i)? * BigUint::from(9u32).pow(i as u32) * ways;
    }
    let num = BigUint::from(4u32).pow(k as u32) * inner;
    let den = falling(5 * n / 2, k) * (2 * k);
    Ok(BigRational::new(num.into(), den.into()))
}

/// `E(Y X_1 (X_1 - 1)) / E Y` for finite `n`, exactly:
/// `16 n (n-1) / ((5n/2)(5n/2 - 1))`. Two loops at one vertex give it
/// in-degree 2, so only loops at distinct vertices contribute. The limit is
/// `mu_1^2`.
pub fn loop_pair_moment_exact(n: usize) -> Result<BigRational> {
    check_even(n)?;
    let p = 5 * n / 2;
    Ok(rat(16 * n * (n - 1), p * (p - 1)))
}

/// Per-sample data for `Y`-weighted cycle statistics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JointSamples {
    pub n: usize,
    pub k_max: usize,
    pub seed: u64,
    /// `y[t]` is the number of valid orientations of sample `t`.
    pub y: Vec<u64>,
    /// `x[t][k-1]` is `X_k` of sample `t`.
    pub x: Vec<Vec<u64>>,
}

/// A ratio estimate `sum Y w / sum Y` with its jackknife standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub trials: usize,
}

impl RatioEstimate {
    /// Pass if within `max(rel * |target|, sigmas * stderr)`.
    pub fn within(&self, target: f64, rel: f64, sigmas: f64) -> bool {
        (self.estimate - target).abs() <= (rel * target.abs()).max(sigmas * self.stderr)
    }
}

/// Sample `trials` pairings on `n` vertices, recording `Y` and `X_1..X_k_max`.
pub fn sample_joint(n: usize, trials: usize, k_max: usize, seed: u64) -> Result<JointSamples> {
    check_even(n)?;
    check_k(k_max)?;
    if n > MC_MAX_N {
        return Err(Error::SizeCap {
            what: "joint moments with exact Y (n)",
            limit: MC_MAX_N,
            got: n,
        });
    }
    let rows: Vec<(u64, Vec<u64>)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let p = sample_pairing(n, seed::derive_indexed(seed, "conditioning/trial", t as u64))?;
            let y = count_valid(&p)?;
            let c = cycle_counts(&p.to_multigraph(), k_max)?;
            Ok((y, (1..=k_max).map(|k| c.get(k)).collect()))
        })
        .collect::<Result<_>>()?;
    let (y, x) = rows.into_iter().unzip();
    Ok(JointSamples { n, k_max, seed, y, x })
}

impl JointSamples {
    /// `sum_t Y_t w_t / sum_t Y_t` for an integer weight `w`.
    pub fn ratio(&self, w: impl Fn(&[u64]) -> u64) -> RatioEstimate {
        let ws: Vec<u128> = self.x.iter().map(|x| w(x) as u128).collect();
        let ys: Vec<u128> = self.y.iter().map(|&y| y as u128).collect();
        let sy: u128 = ys.iter().sum();
        let syw: u128 = ys.iter().zip(&ws).map(|(y, w)| y * w).sum();
        let estimate = syw as f64 / sy as f64;
        let m = ys.len();
        let loo: Vec<f64> = ys
            .iter()
            .zip(&ws)
            .map(|(y, w)| (syw - y * w) as f64 / (sy - y) as f64)
            .collect();
        let mean = loo.iter().sum::<f64>() / m as f64;
        let var = (m as f64 - 1.0) / m as f64 * loo.iter().map(|r| (r - mean).powi(2)).sum::<f64>();
        RatioEstimate {
            estimate,
            stderr: var.sqrt(),
            trials: m,
        }
    }

    /// `E(Y X_k) / E Y`.
    pub fn joint_moment(&self, k: usize) -> RatioEstimate {
        assert!((1..=self.k_max).contains(&k));
        self.ratio(|x| x[k - 1])
    }

    /// `E(Y [X_k]_j) / E Y` with the falling factorial `[X]_j`.
    pub fn factorial_moment(&self, k: usize, j: usize) -> RatioEstimate {
        assert!((1..=self.k_max).contains(&k));
        self.ratio(|x| (0..j as u64).map(|d| x[k - 1].saturating_sub(d)).product())
    }
}

/// `E(Y X_k)/E Y` by simulation with exact `Y` per sample.
pub fn mc_joint_moment(n: usize, trials: usize, k: usize, seed: u64) -> Result<RatioEstimate> {
    Ok(sample_joint(n, trials, k, seed)?.joint_moment(k))
}

/// One row of the conditioning table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CycleMoments {
    pub k: usize,
    pub lambda: String,
    pub mu: String,
    pub delta: String,
    pub lambda_f64: f64,
    pub mu_f64: f64,
    pub delta_f64: f64,
    pub mc: Option<RatioEstimate>,
    /// `E(Y X_k)/E Y` at the simulated `n`, when available.
    pub finite_n: Option<f64>,
}

pub fn cycle_moment_table(k_max: usize, mc: Option<&JointSamples>) -> Result<Vec<CycleMoments>> {
    use crate::numbers::format_rational;
    (1..=k_max)
        .map(|k| {
            let (l, m, d) = (lambda_k(k)?, mu_k(k)?, delta_k(k)?);
            let sim = mc.filter(|s| k <= s.k_max);
            Ok(CycleMoments {
                k,
                lambda: format_rational(&l),
                mu: format_rational(&m),
                delta: format_rational(&d),
                lambda_f64: rational_to_f64(&l),
                mu_f64: rational_to_f64(&m),
                delta_f64: rational_to_f64(&d),
                mc: sim.map(|s| s.joint_moment(k)),
                finite_n: match sim {
                    Some(s) => Some(rational_to_f64(&joint_moment_exact(s.n, k)?)),
                    None => None,
                },
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(lambda_k(1).unwrap(), rat(2, 1));
        assert_eq!(lambda_k(2).unwrap(), rat(4, 1));
        assert_eq!(lambda_k(3).unwrap(), rat(32, 3));
        assert_eq!(mu_k(1).unwrap(), rat(8, 5));
        assert_eq!(mu_k(2).unwrap(), rat(104, 25));
        assert_eq!(delta_k(1).unwrap(), rat(-1, 5));
        assert_eq!(delta_k(2).unwrap(), rat(1, 25));
        assert_eq!(a_i(4, 2).unwrap(), BigUint::from(2u32));
        assert!(a_i(3, 2).is_err());
        assert!(lambda_k(0).is_err());
    }

    #[test]
    fn census_matches_a_i() {
        for k in 1..=12 {
            let census = cycle_orientation_census(k).unwrap();
            for (i, &c) in census.iter().enumerate() {
                assert_eq!(BigUint::from(c), a_i(k, i).unwrap(), "k={k} i={i}");
            }
            assert_eq!(census.iter().sum::<u64>(), 1 << k);
        }
    }

    #[test]
    fn series() {
        assert!((ssc_constant(1).unwrap() - 0.08f64.exp()).abs() < 1e-15);
        assert!((ssc_constant(50).unwrap() - 5.0 / 21f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn joint_moment_exact_values() {
        for n in [2usize, 4, 12, 100] {
            assert_eq!(joint_moment_exact(n, 1).unwrap(), rat(8, 5));
        }
        assert_eq!(loop_pair_moment_exact(12).unwrap(), rat(2112, 870));
        let big = rational_to_f64(&joint_moment_exact(4000, 2).unwrap());
        assert!((big - 4.16).abs() < 0.01);
        let k5 = rational_to_f64(&joint_moment_exact(20000, 5).unwrap());
        assert!((k5 / rational_to_f64(&mu_k(5).unwrap()) - 1.0).abs() < 0.01);
    }
}
