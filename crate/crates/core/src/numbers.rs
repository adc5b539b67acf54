//! Exact rationals and signed log-magnitude numbers.
//!
//! Small instances are evaluated with [`ExactNumber`] (arbitrary precision
//! rationals). Large instances overflow every fixed-width format, so they are
//! carried as [`LogNumber`]: a sign and the natural log of the magnitude.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub type ExactNumber = BigRational;

/// Natural log of a positive big integer, accurate to double precision.
pub fn ln_biguint(x: &BigUint) -> f64 {
    assert!(!x.is_zero(), "ln of zero");
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn ln_bigint(x: &BigInt) -> f64 {
    ln_biguint(x.magnitude())
}

/// Converts an exact rational into log form.
pub fn rational_to_log(q: &BigRational) -> LogNumber {
    if q.is_zero() {
        return LogNumber::zero();
    }
    let ln = ln_bigint(q.numer()) - ln_bigint(q.denom());
    LogNumber::from_parts(if q.is_negative() { -1 } else { 1 }, ln)
}

/// Best double approximation of a rational, also for huge numerators and
/// denominators.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    rational_to_log(q).to_f64()
}

/// Prints an exact rational as `num/den` (or just `num` for integers).
pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn big_factorial(k: u64) -> BigUint {
    (1..=k).fold(BigUint::one(), |acc, i| acc * i)
}

pub fn big_binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Table of `ln k!` for `k = 0..=max`, accumulated with Kahan summation.
#[derive(Debug, Clone)]
pub struct LnFactorials {
    table: Vec<f64>,
}

impl LnFactorials {
    pub fn new(max: usize) -> Self {
        let mut table = Vec::with_capacity(max + 1);
        table.push(0.0);
        let (mut sum, mut carry) = (0.0f64, 0.0f64);
        for i in 1..=max {
            let y = (i as f64).ln() - carry;
            let t = sum + y;
            carry = (t - sum) - y;
            sum = t;
            table.push(sum);
        }
        LnFactorials { table }
    }

    #[inline]
    pub fn get(&self, k: usize) -> f64 {
        self.table[k]
    }

    pub fn max(&self) -> usize {
        self.table.len() - 1
    }

    pub fn ln_binomial(&self, n: usize, k: usize) -> f64 {
        self.get(n) - self.get(k) - self.get(n - k)
    }
}

/// A real number stored as `sign * exp(ln_abs)`.
///
/// `sign == 0` encodes zero and `ln_abs` is then ignored. Products and
/// quotients are exact in the exponent; sums go through a shifted
/// log-sum-exp and lose at most a few ulps of relative precision.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LogNumber {
    sign: i8,
    ln_abs: f64,
}

impl LogNumber {
    pub fn zero() -> Self {
        LogNumber {
            sign: 0,
            ln_abs: f64::NEG_INFINITY,
        }
    }

    pub fn one() -> Self {
        LogNumber {
            sign: 1,
            ln_abs: 0.0,
        }
    }

    pub fn from_parts(sign: i8, ln_abs: f64) -> Self {
        if sign == 0 || ln_abs == f64::NEG_INFINITY {
            return Self::zero();
        }
        LogNumber {
            sign: sign.signum(),
            ln_abs,
        }
    }

    /// A positive number given by its natural log.
    pub fn from_ln(ln_abs: f64) -> Self {
        Self::from_parts(1, ln_abs)
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::zero()
        } else {
            Self::from_parts(if x < 0.0 { -1 } else { 1 }, x.abs().ln())
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn ln_abs(&self) -> f64 {
        self.ln_abs
    }

    pub fn log10_abs(&self) -> f64 {
        self.ln_abs / std::f64::consts::LN_10
    }

    pub fn to_f64(&self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => f64::from(s) * self.ln_abs.exp(),
        }
    }

    pub fn sqrt(self) -> Self {
        assert!(self.sign >= 0, "sqrt of a negative LogNumber");
        if self.is_zero() {
            return self;
        }
        Self::from_ln(self.ln_abs / 2.0)
    }

    pub fn powi(self, e: i32) -> Self {
        if self.is_zero() {
            return if e == 0 { Self::one() } else { self };
        }
        let sign = if e % 2 == 0 { 1 } else { self.sign };
        Self::from_parts(sign, self.ln_abs * f64::from(e))
    }

    /// Relative difference `|self - other| / |other|`.
    pub fn rel_err(&self, other: &LogNumber) -> f64 {
        if other.is_zero() {
            return if self.is_zero() { 0.0 } else { f64::INFINITY };
        }
        (*self / *other - LogNumber::one()).to_f64().abs()
    }
}

impl Mul for LogNumber {
    type Output = LogNumber;
    fn mul(self, rhs: LogNumber) -> LogNumber {
        Self::from_parts(self.sign * rhs.sign, self.ln_abs + rhs.ln_abs)
    }
}

impl Div for LogNumber {
    type Output = LogNumber;
    fn div(self, rhs: LogNumber) -> LogNumber {
        assert!(!rhs.is_zero(), "LogNumber division by zero");
        Self::from_parts(self.sign * rhs.sign, self.ln_abs - rhs.ln_abs)
    }
}

impl Neg for LogNumber {
    type Output = LogNumber;
    fn neg(self) -> LogNumber {
        Self::from_parts(-self.sign, self.ln_abs)
    }
}

impl Add for LogNumber {
    type Output = LogNumber;
    fn add(self, rhs: LogNumber) -> LogNumber {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (big, small) = if self.ln_abs >= rhs.ln_abs {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let t = (small.ln_abs - big.ln_abs).exp();
        if big.sign == small.sign {
            Self::from_parts(big.sign, big.ln_abs + t.ln_1p())
        } else if t == 1.0 {
            Self::zero()
        } else {
            Self::from_parts(big.sign, big.ln_abs + (-t).ln_1p())
        }
    }
}

impl Sub for LogNumber {
    type Output = LogNumber;
    fn sub(self, rhs: LogNumber) -> LogNumber {
        self + (-rhs)
    }
}

impl PartialEq for LogNumber {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for LogNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => match self.sign {
                0 => Some(Ordering::Equal),
                1 => self.ln_abs.partial_cmp(&other.ln_abs),
                _ => other.ln_abs.partial_cmp(&self.ln_abs),
            },
            ord => Some(ord),
        }
    }
}

impl fmt::Display for LogNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let l10 = self.log10_abs();
        let exp = l10.floor();
        let mant = 10f64.powf(l10 - exp);
        let sign = if self.sign < 0 { "-" } else { "" };
        write!(f, "{sign}{mant:.11}e{exp}")
    }
}

/// Sums positive log-space terms by shifting every term by the running
/// maximum, so that the result does not depend on where the peak is.
#[derive(Debug, Clone, Copy)]
pub struct LogSumAcc {
    shift: f64,
    sum: f64,
    carry: f64,
}

impl Default for LogSumAcc {
    fn default() -> Self {
        LogSumAcc {
            shift: f64::NEG_INFINITY,
            sum: 0.0,
            carry: 0.0,
        }
    }
}

impl LogSumAcc {
    pub fn push_ln(&mut self, ln_term: f64) {
        if ln_term == f64::NEG_INFINITY {
            return;
        }
        if ln_term > self.shift {
            let scale = (self.shift - ln_term).exp();
            self.sum *= scale;
            self.carry *= scale;
            self.shift = ln_term;
        }
        let y = (ln_term - self.shift).exp() - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn merge(&mut self, other: &LogSumAcc) {
        if other.sum == 0.0 {
            return;
        }
        self.push_ln(other.shift + other.sum.ln());
    }

    pub fn ln(&self) -> f64 {
        if self.sum == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.shift + self.sum.ln()
        }
    }

    pub fn value(&self) -> LogNumber {
        LogNumber::from_ln(self.ln())
    }
}
