//! First and second moments of the number `Y` of valid orientations of a
//! random pairing.
//!
//! Both moments are ratios of configuration counts to `M(5n)`. Small `n` is
//! evaluated exactly with big integers; any `n` can be evaluated in log
//! space. The second moment counts ordered pairs of valid orientations of
//! the same pairing, identical pairs included, so it is `E[Y^2]`.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::landscape;
use crate::numbers::{big_binomial, big_factorial, ln_biguint, rational_to_log, LnFactorials, LogNumber, LogSumAcc};
use crate::orientation::count_valid;
use crate::pairing::{check_even, num_pairings, sample_pairing, Estimate};

/// Largest `n` accepted by exact second-moment evaluation by default.
pub const EXACT_CAP: usize = 40;

/// `lim E[Y^2] / (E Y)^2 = 5 / sqrt(21)`.
pub fn ratio_limit() -> f64 {
    5.0 / 21f64.sqrt()
}

/// Overlap pattern of two valid orientations of one pairing.
///
/// `k` vertices are in-vertices in both orientations. `k11` of them have the
/// same special point in both, `k00` is the same count among the `k`
/// vertices that are out-vertices in both, and `k10` / `k01` count shared
/// special points among the `n/2 - k` vertices that switch from in to out /
/// out to in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndexVector {
    pub k: usize,
    pub k00: usize,
    pub k01: usize,
    pub k10: usize,
    pub k11: usize,
}

impl IndexVector {
    pub fn new(k: usize, k00: usize, k01: usize, k10: usize, k11: usize) -> Self {
        IndexVector { k, k00, k01, k10, k11 }
    }

    pub fn is_member(&self, n: usize) -> bool {
        let half = n / 2;
        n.is_multiple_of(2)
            && self.k <= half
            && self.k00.max(self.k11) <= self.k
            && self.k01.max(self.k10) <= half - self.k
    }

    /// The same pattern with the two orientations exchanged.
    pub fn swapped(&self) -> Self {
        IndexVector {
            k: self.k,
            k00: self.k11,
            k01: self.k10,
            k10: self.k01,
            k11: self.k00,
        }
    }

    /// Number of (in,in) points, which equals the number of (out,out) points.
    pub fn in_in_points(&self, n: usize) -> usize {
        n + self.k + self.k00 + self.k11 - self.k01 - self.k10
    }
}

/// All members of `I(n)`, outer loop on `k`.
pub fn enumerate_index_set(n: usize) -> Result<impl Iterator<Item = IndexVector>> {
    check_even(n)?;
    let half = n / 2;
    Ok((0..=half).flat_map(move |k| {
        let m = half - k;
        (0..=k).flat_map(move |k00| {
            (0..=k).flat_map(move |k11| {
                (0..=m).flat_map(move |k01| (0..=m).map(move |k10| IndexVector { k, k00, k01, k10, k11 }))
            })
        })
    }))
}

/// `|I(n)| = sum_k (k+1)^2 (n/2-k+1)^2`.
pub fn index_set_size(n: usize) -> Result<u64> {
    check_even(n)?;
    let half = (n / 2) as u64;
    Ok((0..=half).map(|k| (k + 1).pow(2) * (half - k + 1).pow(2)).sum())
}

/// `E Y = C(n, n/2) 5^n (5n/2)! / M(5n)`, checked against the equivalent
/// form `n! 5^n (5n/2)!^2 2^(5n/2) / ((n/2)!^2 (5n)!)`.
pub fn first_moment_exact(n: usize) -> Result<BigRational> {
    let (a, b) = first_moment_forms(n)?;
    assert_eq!(a, b, "closed forms of E Y disagree at n = {n}");
    Ok(a)
}

/// Both closed forms of `E Y`, unreduced by any shared code path.
pub fn first_moment_forms(n: usize) -> Result<(BigRational, BigRational)> {
    check_even(n)?;
    let n64 = n as u64;
    let pow5 = BigUint::from(5u32).pow(n as u32);
    let by_selection = BigRational::new(
        (big_binomial(n64, n64 / 2) * &pow5 * big_factorial(5 * n64 / 2)).into(),
        num_pairings(5 * n64)?.into(),
    );
    let half_fact = big_factorial(5 * n64 / 2);
    let num = big_factorial(n64) * &pow5 * &half_fact * &half_fact * (BigUint::one() << (5 * n / 2));
    let den = big_factorial(n64 / 2).pow(2) * big_factorial(5 * n64);
    Ok((by_selection, BigRational::new(num.into(), den.into())))
}

fn ln_pairings(lf: &LnFactorials, s: usize) -> f64 {
    lf.get(s) - lf.get(s / 2) - (s / 2) as f64 * std::f64::consts::LN_2
}

/// `E Y` evaluated in log space; works for any even `n`.
pub fn first_moment_log(n: usize) -> Result<LogNumber> {
    check_even(n)?;
    let lf = LnFactorials::new(5 * n);
    let ln = lf.ln_binomial(n, n / 2) + n as f64 * 5f64.ln() + lf.get(5 * n / 2) - ln_pairings(&lf, 5 * n);
    Ok(LogNumber::from_ln(ln))
}

/// `E Y ~ (25/8)^(n/2) sqrt(5)`.
pub fn first_moment_asymptotic(n: usize) -> Result<LogNumber> {
    check_even(n)?;
    Ok(LogNumber::from_ln(n as f64 / 2.0 * (25.0f64 / 8.0).ln() + 0.5 * 5f64.ln()))
}

/// Number of (pairing, orientation, orientation) configurations with
/// overlap pattern `iv`. Dividing by `M(5n)` gives the summand.
pub fn configuration_count(n: usize, iv: &IndexVector) -> Result<BigUint> {
    check_member(n, iv)?;
    let half = n / 2;
    let groups = [
        iv.k00,
        iv.k01,
        iv.k10,
        iv.k11,
        iv.k - iv.k00,
        iv.k - iv.k11,
        half - iv.k - iv.k01,
        half - iv.k - iv.k10,
    ];
    let multinomial = groups
        .iter()
        .fold(big_factorial(n as u64), |acc, &g| acc / big_factorial(g as u64));
    let same = iv.k00 + iv.k01 + iv.k10 + iv.k11;
    let a = iv.in_in_points(n);
    let b = 5 * n / 2 - a;
    Ok(multinomial
        * BigUint::from(5u32).pow(n as u32)
        * BigUint::from(4u32).pow((n - same) as u32)
        * big_factorial(a as u64)
        * big_factorial(b as u64))
}

fn check_member(n: usize, iv: &IndexVector) -> Result<()> {
    check_even(n)?;
    if !iv.is_member(n) {
        return domain(format!("{iv:?} is not in I({n})"));
    }
    Ok(())
}

/// One summand of the second moment, exactly.
pub fn second_moment_term(n: usize, iv: &IndexVector) -> Result<BigRational> {
    let count = configuration_count(n, iv)?;
    Ok(BigRational::new(count.into(), num_pairings(5 * n as u64)?.into()))
}

/// Natural log of one summand; `lf` must cover `5n`.
pub fn second_moment_term_ln(n: usize, iv: &IndexVector, lf: &LnFactorials) -> f64 {
    let half = n / 2;
    let same = iv.k00 + iv.k01 + iv.k10 + iv.k11;
    let a = iv.in_in_points(n);
    let groups = lf.get(iv.k00)
        + lf.get(iv.k01)
        + lf.get(iv.k10)
        + lf.get(iv.k11)
        + lf.get(iv.k - iv.k00)
        + lf.get(iv.k - iv.k11)
        + lf.get(half - iv.k - iv.k01)
        + lf.get(half - iv.k - iv.k10);
    lf.get(n) - groups + n as f64 * 5f64.ln() + (n - same) as f64 * 4f64.ln() + lf.get(a) + lf.get(5 * n / 2 - a)
        - ln_pairings(lf, 5 * n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arithmetic {
    Exact,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MomentValue {
    Exact(BigRational),
    Log(LogNumber),
}

impl MomentValue {
    pub fn to_log(&self) -> LogNumber {
        match self {
            MomentValue::Exact(q) => rational_to_log(q),
            MomentValue::Log(l) => *l,
        }
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            MomentValue::Exact(q) => Some(q),
            MomentValue::Log(_) => None,
        }
    }
}

/// `E[Y^2]` in the requested arithmetic. Exact mode is capped at
/// [`EXACT_CAP`].
pub fn second_moment(n: usize, arithmetic: Arithmetic) -> Result<MomentValue> {
    match arithmetic {
        Arithmetic::Exact => second_moment_exact(n).map(MomentValue::Exact),
        Arithmetic::Log => second_moment_log(n).map(MomentValue::Log),
    }
}

pub fn second_moment_exact(n: usize) -> Result<BigRational> {
    second_moment_exact_capped(n, EXACT_CAP)
}

/// The second moment as an exact rational.
///
/// For fixed `k` and `m = n/2 - k` the summand depends on `(k00, k11)` only
/// through `d1 = k00 + k11` apart from the factor `C(k,k00) C(k,k11)`, whose
/// sum over a fixed `d1` is `C(2k, d1)`; likewise for `(k01, k10)` with
/// `C(2m, d2)`. That turns the sum over `I(n)` into
///
/// ```text
/// sum_k n! 5^n / (k!^2 m!^2) sum_{d1,d2} C(2k,d1) C(2m,d2) 4^(n-d1-d2) A! B!
/// ```
///
/// with `A = n + k + d1 - d2` and `B = 5n/2 - A`, all over `M(5n)`.
pub fn second_moment_exact_capped(n: usize, cap: usize) -> Result<BigRational> {
    check_even(n)?;
    if n > cap {
        return Err(Error::SizeCap {
            what: "exact second moment (n); use log mode",
            limit: cap,
            got: n,
        });
    }
    let half = n / 2;
    let facts: Vec<BigUint> = {
        let mut v = vec![BigUint::one()];
        for i in 1..=(5 * n / 2) as u64 {
            let next = v.last().unwrap() * i;
            v.push(next);
        }
        v
    };
    let pow4: Vec<BigUint> = (0..=n).map(|e| BigUint::from(4u32).pow(e as u32)).collect();
    let per_k: Vec<BigUint> = (0..=half)
        .into_par_iter()
        .map(|k| {
            let m = half - k;
            let outer = &facts[n] / (&facts[k] * &facts[k] * &facts[m] * &facts[m]);
            let c1: Vec<BigUint> = (0..=2 * k).map(|d| big_binomial(2 * k as u64, d as u64)).collect();
            let c2: Vec<BigUint> = (0..=2 * m).map(|d| big_binomial(2 * m as u64, d as u64)).collect();
            let mut inner = BigUint::default();
            for (d1, x1) in c1.iter().enumerate() {
                for (d2, x2) in c2.iter().enumerate() {
                    let a = n + k + d1 - d2;
                    inner += x1 * x2 * &pow4[n - d1 - d2] * &facts[a] * &facts[5 * n / 2 - a];
                }
            }
            outer * inner
        })
        .collect();
    let total: BigUint = per_k.iter().sum();
    let total = total * BigUint::from(5u32).pow(n as u32);
    Ok(BigRational::new(total.into(), num_pairings(5 * n as u64)?.into()))
}

/// The second moment in log space, by the same collapsed sum as
/// [`second_moment_exact_capped`]. Per-`k` partial sums are computed in
/// parallel and merged in `k` order, so the result does not depend on the
/// number of worker threads.
pub fn second_moment_log(n: usize) -> Result<LogNumber> {
    check_even(n)?;
    let half = n / 2;
    let lf = LnFactorials::new(5 * n);
    let ln4 = 4f64.ln();
    let base = lf.get(n) + n as f64 * 5f64.ln() - ln_pairings(&lf, 5 * n);
    let partials: Vec<LogSumAcc> = (0..=half)
        .into_par_iter()
        .map(|k| {
            let m = half - k;
            let outer = base - 2.0 * lf.get(k) - 2.0 * lf.get(m);
            let mut acc = LogSumAcc::default();
            for d1 in 0..=2 * k {
                let c1 = lf.ln_binomial(2 * k, d1);
                for d2 in 0..=2 * m {
                    let a = n + k + d1 - d2;
                    acc.push_ln(
                        outer
                            + c1
                            + lf.ln_binomial(2 * m, d2)
                            + (n - d1 - d2) as f64 * ln4
                            + lf.get(a)
                            + lf.get(5 * n / 2 - a),
                    );
                }
            }
            acc
        })
        .collect();
    let mut total = LogSumAcc::default();
    for p in &partials {
        total.merge(p);
    }
    Ok(total.value())
}

/// The second moment as a plain sum of [`second_moment_term_ln`] over every
/// member of `I(n)`. Independent of the collapsed sum; `O(n^5)` terms.
pub fn second_moment_log_direct(n: usize) -> Result<LogNumber> {
    let lf = LnFactorials::new(5 * n);
    let half = n / 2;
    let partials: Vec<LogSumAcc> = (0..=half)
        .into_par_iter()
        .map(|k| {
            let mut acc = LogSumAcc::default();
            let m = half - k;
            for k00 in 0..=k {
                for k11 in 0..=k {
                    for k01 in 0..=m {
                        for k10 in 0..=m {
                            let iv = IndexVector { k, k00, k01, k10, k11 };
                            acc.push_ln(second_moment_term_ln(n, &iv, &lf));
                        }
                    }
                }
            }
            acc
        })
        .collect();
    check_even(n)?;
    let mut total = LogSumAcc::default();
    for p in &partials {
        total.merge(p);
    }
    Ok(total.value())
}

/// `E[Y^2] ~ (25/8)^n g(z~) (pi n)^(5/2) / sqrt|det B| = (25/sqrt 21) (25/8)^n`.
pub fn second_moment_asymptotic(n: usize) -> Result<LogNumber> {
    check_even(n)?;
    Ok(LogNumber::from_ln(
        n as f64 * (25.0f64 / 8.0).ln() + landscape::laplace_coefficient().ln(),
    ))
}

/// `E[Y(Y-1)] = E[Y^2] - E[Y]`, exactly.
pub fn factorial_second_moment_exact(n: usize) -> Result<BigRational> {
    Ok(second_moment_exact(n)? - first_moment_exact(n)?)
}

/// `E[Y^2] / (E Y)^2`, from the log-space moments.
pub fn moment_ratio(n: usize) -> Result<f64> {
    let second = second_moment_log(n)?;
    let first = first_moment_log(n)?;
    Ok((second / first.powi(2)).to_f64())
}

/// `E[Y^2] / (E Y)^2` from exact rationals (capped like the exact moment).
pub fn moment_ratio_exact(n: usize) -> Result<BigRational> {
    let first = first_moment_exact(n)?;
    Ok(second_moment_exact(n)? / (&first * &first))
}

/// Sample mean of `Y` over `trials` uniform pairings, with exact `Y` per
/// sample (so `5n/2` must be within the exact counting cap).
pub fn mc_first_moment(n: usize, trials: usize, seed: u64) -> Result<Estimate> {
    check_even(n)?;
    let ys: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let p = sample_pairing(n, crate::seed::derive_indexed(seed, "moments/mc-first", t as u64))?;
            Ok(count_valid(&p)? as f64)
        })
        .collect::<Result<_>>()?;
    Ok(Estimate::from_samples(&ys))
}

/// Relative size of a big rational against a float target.
pub fn rational_rel_err(q: &BigRational, target: f64) -> f64 {
    (crate::numbers::rational_to_f64(q) / target - 1.0).abs()
}

/// Rough log10 of an exact rational, for reports.
pub fn rational_log10(q: &BigRational) -> f64 {
    (ln_biguint(q.numer().magnitude()) - ln_biguint(q.denom().magnitude())) / std::f64::consts::LN_10
}

/// `u64` view of an exact integer-valued rational, if it fits.
pub fn rational_as_u64(q: &BigRational) -> Option<u64> {
    if q.is_integer() {
        q.numer().to_u64()
    } else {
        None
    }
}
