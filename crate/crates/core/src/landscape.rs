//! The exponent `f` of the second-moment summand on the polytope `J`, its
//! stationary points, the quadratic form `B` at the maximiser and the
//! resulting Laplace coefficient.
//!
//! Coordinates are always ordered `(z, z00, z01, z10, z11)`.

use nalgebra::{Matrix5, SymmetricEigen, Vector5};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::seed;

/// Slack allowed when testing membership of `J`.
pub const MEMBER_TOL: f64 = 1e-12;

/// `B` at the maximiser, times 10.
pub const B_TIMES_TEN: [[i64; 5]; 5] = [
    [-92, 33, -33, -33, 33],
    [33, -117, -8, -8, 8],
    [-33, -8, -117, 8, -8],
    [-33, -8, 8, -117, -8],
    [33, 8, -8, -8, -117],
];

/// `log(25/8)`, the maximum of `f` on `J`.
pub fn f_max() -> f64 {
    (25.0f64 / 8.0).ln()
}

/// `x log x`, continued by 0 at 0.
pub fn h(x: f64) -> f64 {
    if x <= 1e-300 {
        0.0
    } else {
        x * x.ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZVector {
    pub z: f64,
    pub z00: f64,
    pub z01: f64,
    pub z10: f64,
    pub z11: f64,
}

impl ZVector {
    pub fn new(z: f64, z00: f64, z01: f64, z10: f64, z11: f64) -> Self {
        ZVector { z, z00, z01, z10, z11 }
    }

    /// `(1/4, 1/20, 1/20, 1/20, 1/20)`.
    pub fn tilde() -> Self {
        ZVector::new(0.25, 0.05, 0.05, 0.05, 0.05)
    }

    pub fn to_array(&self) -> [f64; 5] {
        [self.z, self.z00, self.z01, self.z10, self.z11]
    }

    pub fn from_array(a: [f64; 5]) -> Self {
        ZVector::new(a[0], a[1], a[2], a[3], a[4])
    }

    fn to_vector(self) -> Vector5<f64> {
        Vector5::from(self.to_array())
    }

    fn from_vector(v: &Vector5<f64>) -> Self {
        ZVector::new(v[0], v[1], v[2], v[3], v[4])
    }

    /// The eight quantities that must be non-negative in `J`:
    /// `z00, z01, z10, z11, z-z00, z-z11, 1/2-z-z01, 1/2-z-z10`.
    pub fn slacks(&self) -> [f64; 8] {
        [
            self.z00,
            self.z01,
            self.z10,
            self.z11,
            self.z - self.z00,
            self.z - self.z11,
            0.5 - self.z - self.z01,
            0.5 - self.z - self.z10,
        ]
    }

    pub fn is_member(&self) -> bool {
        self.to_array().iter().all(|x| x.is_finite()) && self.slacks().iter().all(|&s| s >= -MEMBER_TOL)
    }

    pub fn is_interior(&self) -> bool {
        self.to_array().iter().all(|x| x.is_finite()) && self.slacks().iter().all(|&s| s > 0.0)
    }

    /// Exchange the roles of the two orientations.
    pub fn swapped(&self) -> Self {
        ZVector::new(self.z, self.z11, self.z10, self.z01, self.z00)
    }

    pub fn offset(&self, y: &YVector) -> Self {
        ZVector::new(self.z + y.y, self.z00 + y.y00, self.z01 + y.y01, self.z10 + y.y10, self.z11 + y.y11)
    }

    pub fn distance(&self, other: &ZVector) -> f64 {
        (self.to_vector() - other.to_vector()).norm()
    }
}

/// A displacement from the maximiser.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YVector {
    pub y: f64,
    pub y00: f64,
    pub y01: f64,
    pub y10: f64,
    pub y11: f64,
}

impl YVector {
    pub fn from_array(a: [f64; 5]) -> Self {
        YVector { y: a[0], y00: a[1], y01: a[2], y10: a[3], y11: a[4] }
    }

    pub fn to_array(&self) -> [f64; 5] {
        [self.y, self.y00, self.y01, self.y10, self.y11]
    }

    pub fn norm(&self) -> f64 {
        Vector5::from(self.to_array()).norm()
    }
}

fn check_member(zv: &ZVector) -> Result<()> {
    if zv.is_member() {
        Ok(())
    } else {
        domain(format!("{zv:?} is not in J"))
    }
}

fn check_interior(zv: &ZVector) -> Result<()> {
    if zv.is_interior() {
        Ok(())
    } else {
        domain(format!("{zv:?} is not in the interior of J"))
    }
}

fn b_raw(zv: &ZVector) -> f64 {
    zv.z + 1.0 + zv.z00 - zv.z01 - zv.z10 + zv.z11
}

/// `b = z + 1 + z00 - z01 - z10 + z11`.
pub fn b_of(zv: &ZVector) -> Result<f64> {
    check_member(zv)?;
    Ok(b_raw(zv))
}

fn f_raw(zv: &ZVector) -> f64 {
    let b = b_raw(zv);
    let same = zv.z00 + zv.z01 + zv.z10 + zv.z11;
    let s = zv.slacks();
    (2.25 - same) * 4f64.ln() + 5f64.ln() - h(5.0) + h(2.5) + h(b) + h(2.5 - b) - s.iter().map(|&x| h(x)).sum::<f64>()
}

pub fn f_of(zv: &ZVector) -> Result<f64> {
    check_member(zv)?;
    Ok(f_raw(zv))
}

/// The polynomial prefactor of the summand, for `n` vertices.
pub fn g_of(zv: &ZVector, n: f64) -> Result<f64> {
    check_interior(zv)?;
    if n.is_nan() || n <= 0.0 {
        return domain("g needs n > 0");
    }
    let b = b_raw(zv);
    let s = zv.slacks();
    let denom: f64 = s[..6].iter().product::<f64>() * (2.0 * s[6]) * (2.0 * s[7]);
    Ok((b * (5.0 - 2.0 * b) / denom).sqrt() / (32f64.sqrt() * (PI * n).powf(2.5)))
}

/// Numerator and denominator of `exp(df/dx)` for each coordinate; the
/// stationary polynomials are their differences.
pub fn stationary_parts(zv: &ZVector) -> [(f64, f64); 5] {
    let ZVector { z, z00, z01, z10, z11 } = *zv;
    let b = b_raw(zv);
    let c = 5.0 - 2.0 * b;
    let r01 = 1.0 - 2.0 * z - 2.0 * z01;
    let r10 = 1.0 - 2.0 * z - 2.0 * z10;
    [
        (b * r01 * r10, 2.0 * c * (z - z00) * (z - z11)),
        ((z - z00) * b, 2.0 * z00 * c),
        (r01 * c, 16.0 * b * z01),
        (r10 * c, 16.0 * b * z10),
        ((z - z11) * b, 2.0 * z11 * c),
    ]
}

/// `(P, P00, P01, P10, P11)`.
pub fn stationary_polys(zv: &ZVector) -> [f64; 5] {
    stationary_parts(zv).map(|(num, den)| num - den)
}

pub fn grad_f(zv: &ZVector) -> Result<[f64; 5]> {
    check_interior(zv)?;
    Ok(stationary_parts(zv).map(|(num, den)| (num / den).ln()))
}

/// `df/dz00` written out in the expanded form `log((z-z00) b / (2 z00 (3 - 2z - 2z00 + 2z01 + 2z10 - 2z11)))`.
pub fn dz00_expanded(zv: &ZVector) -> Result<f64> {
    check_interior(zv)?;
    let ZVector { z, z00, z01, z10, z11 } = *zv;
    let num = (z - z00) * (z + 1.0 + z00 - z01 - z10 + z11);
    let den = 2.0 * z00 * (3.0 - 2.0 * z - 2.0 * z00 + 2.0 * z01 + 2.0 * z10 - 2.0 * z11);
    Ok((num / den).ln())
}

/// `P6 = 5z - 5z00 - 10z^2 + 10 z z00 - 10 z01 z - 150 z01 z00`.
pub fn p6(zv: &ZVector) -> f64 {
    let ZVector { z, z00, z01, .. } = *zv;
    5.0 * z - 5.0 * z00 - 10.0 * z * z + 10.0 * z * z00 - 10.0 * z01 * z - 150.0 * z01 * z00
}

/// `P7(z, z00) = -60z^3 - 480z^2 z00 - 120 z z00 - 1500 z z00^2 + 2040 z00^2 - 1800 z00^3`.
pub fn p7(z: f64, z00: f64) -> f64 {
    -60.0 * z.powi(3) - 480.0 * z * z * z00 - 120.0 * z * z00 - 1500.0 * z * z00 * z00 + 2040.0 * z00 * z00
        - 1800.0 * z00.powi(3)
}

/// Roots of `a x^2 + b x + c`, ascending.
pub fn quadratic_roots(a: f64, b: f64, c: f64) -> Option<(f64, f64)> {
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 || a == 0.0 {
        return None;
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let (r1, r2) = (q / a, c / q);
    Some((r1.min(r2), r1.max(r2)))
}

/// `f(0, 0, z01, z10, 0)` on `[0, 1/2]^2`.
pub fn f_bar(z01: f64, z10: f64) -> Result<f64> {
    let ok = |x: f64| (-MEMBER_TOL..=0.5 + MEMBER_TOL).contains(&x);
    if !(ok(z01) && ok(z10)) {
        return domain(format!("f_bar needs arguments in [0, 1/2], got ({z01}, {z10})"));
    }
    Ok(f_raw(&ZVector::new(0.0, 0.0, z01, z10, 0.0)))
}

/// `d/dt f_bar(t, t) = 2 log((3 + 4t) / (16 t))`.
pub fn f_bar_diagonal_derivative(t: f64) -> f64 {
    2.0 * ((3.0 + 4.0 * t) / (16.0 * t)).ln()
}

/// `1/2` times the matrix of second partials of `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct HessianB {
    pub matrix: Matrix5<f64>,
    /// `max |A - A^T|` of the raw finite-difference matrix before
    /// symmetrisation (zero for the exact matrix).
    pub raw_asymmetry: f64,
}

impl HessianB {
    /// The exact matrix at the maximiser.
    pub fn exact() -> Self {
        HessianB {
            matrix: Matrix5::from_fn(|i, j| B_TIMES_TEN[i][j] as f64 / 10.0),
            raw_asymmetry: 0.0,
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix[(i, j)]
    }

    pub fn asymmetry(&self) -> f64 {
        (self.matrix - self.matrix.transpose()).abs().max()
    }

    pub fn quadratic_form(&self, y: &YVector) -> f64 {
        let v = Vector5::from(y.to_array());
        v.dot(&(self.matrix * v))
    }

    pub fn max_abs_diff(&self, other: &HessianB) -> f64 {
        (self.matrix - other.matrix).abs().max()
    }
}

fn grad_vec(zv: &ZVector) -> Result<Vector5<f64>> {
    grad_f(zv).map(Vector5::from)
}

fn second_partials(zv: &ZVector, step: f64) -> Result<Matrix5<f64>> {
    let x = zv.to_vector();
    let mut m = Matrix5::zeros();
    for j in 0..5 {
        let mut e = Vector5::zeros();
        e[j] = step;
        let col = (grad_vec(&ZVector::from_vector(&(x + e)))? - grad_vec(&ZVector::from_vector(&(x - e)))?) / (2.0 * step);
        m.set_column(j, &col);
    }
    Ok(m)
}

/// `B(zv)` by central differences of the analytic gradient at steps `1e-5`
/// and `5e-6`, combined by Richardson extrapolation and symmetrised.
pub fn hessian_at(zv: &ZVector) -> Result<HessianB> {
    check_interior(zv)?;
    let step = 1e-5;
    let coarse = second_partials(zv, step)?;
    let fine = second_partials(zv, step / 2.0)?;
    let full = (fine * 4.0 - coarse) / 3.0;
    let raw_asymmetry = (full - full.transpose()).abs().max();
    Ok(HessianB {
        matrix: (full + full.transpose()) / 4.0,
        raw_asymmetry,
    })
}

#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Ascending.
    pub eigenvalues: [f64; 5],
    pub determinant: BigRational,
    pub determinant_f64: f64,
}

/// `(-37 - sqrt 697)/4, -25/2 (three times), (-37 + sqrt 697)/4`, ascending.
pub fn eigenvalues_closed_form() -> [f64; 5] {
    let r = 697f64.sqrt();
    [(-37.0 - r) / 4.0, -12.5, -12.5, -12.5, (-37.0 + r) / 4.0]
}

/// Exact determinant of a square rational matrix by fraction-exact
/// Gaussian elimination.
pub fn rational_determinant(mut a: Vec<Vec<BigRational>>) -> BigRational {
    let n = a.len();
    let mut det = BigRational::from_integer(1.into());
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        let pivot = a[col][col].clone();
        det *= &pivot;
        let pivot_row = a[col].clone();
        for row in a.iter_mut().skip(col + 1) {
            let factor = &row[col] / &pivot;
            for (x, p) in row.iter_mut().zip(&pivot_row).skip(col) {
                *x -= &factor * p;
            }
        }
    }
    det
}

/// Eigenvalues and exact determinant of `B` at the maximiser.
pub fn spectrum_b() -> Spectrum {
    let eig = SymmetricEigen::new(HessianB::exact().matrix);
    let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    let rows = B_TIMES_TEN
        .iter()
        .map(|row| row.iter().map(|&x| BigRational::new(BigInt::from(x), BigInt::from(10))).collect())
        .collect();
    let determinant = rational_determinant(rows);
    let determinant_f64 = crate::numbers::rational_to_f64(&determinant);
    Spectrum {
        eigenvalues: [ev[0], ev[1], ev[2], ev[3], ev[4]],
        determinant,
        determinant_f64,
    }
}

/// `g(z~) (pi n)^(5/2) / sqrt|det B|`, which does not depend on `n`.
pub fn laplace_coefficient() -> f64 {
    let g = g_of(&ZVector::tilde(), 1.0).expect("z~ is interior");
    let det = spectrum_b().determinant;
    g * PI.powf(2.5) / crate::numbers::rational_to_f64(&det.abs()).sqrt()
}

/// Draw a point uniformly from `J`. The marginal density of `z` is
/// proportional to `z^2 (1/2 - z)^2`.
pub fn sample_j(rng: &mut seed::Rng) -> ZVector {
    let z = loop {
        let z: f64 = rng.random_range(0.0..0.5);
        let w = (z * (0.5 - z) * 16.0).powi(2);
        if rng.random::<f64>() < w {
            break z;
        }
    };
    let r = 0.5 - z;
    ZVector::new(
        z,
        rng.random_range(0.0..=z),
        rng.random_range(0.0..=r),
        rng.random_range(0.0..=r),
        rng.random_range(0.0..=z),
    )
}

/// Largest `f` over `samples` uniform points of `J`, with its location.
pub fn global_scan(samples: usize, seed: u64) -> (ZVector, f64) {
    const CHUNK: usize = 1 << 14;
    let chunks = samples.div_ceil(CHUNK);
    let best = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = seed::rng(seed::derive_indexed(seed, "landscape/scan", c as u64));
            let count = CHUNK.min(samples - c * CHUNK);
            let mut best = (ZVector::tilde(), f64::NEG_INFINITY);
            for _ in 0..count {
                let p = sample_j(&mut rng);
                let v = f_raw(&p);
                if v > best.1 {
                    best = (p, v);
                }
            }
            best
        })
        .collect::<Vec<_>>();
    best.into_iter()
        .fold((ZVector::tilde(), f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateKind {
    /// Reached by ascent from interior starting points.
    Interior,
    /// One of the two boundary points `(0,0,1/2,1/2,0)` and `(1/2,1/2,0,0,1/2)`.
    Boundary,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Candidate {
    pub point: ZVector,
    pub value: f64,
    pub kind: CandidateKind,
    /// Number of starts that converged here.
    pub hits: usize,
    pub grad_norm: Option<f64>,
}

/// Boundary points where `f_bar` and its `z = 1/2` copy peak.
pub fn boundary_candidates() -> [ZVector; 2] {
    [ZVector::new(0.0, 0.0, 0.5, 0.5, 0.0), ZVector::new(0.5, 0.5, 0.0, 0.0, 0.5)]
}

/// Local maxima of `f` from `n_starts` uniform interior starts plus the
/// boundary candidates, sorted by value (descending) then coordinates.
/// Interior results within `tol` of each other are merged.
pub fn maximize_f(n_starts: usize, tol: f64, seed: u64) -> Vec<Candidate> {
    let runs: Vec<(ZVector, f64)> = (0..n_starts)
        .into_par_iter()
        .map(|i| {
            let mut rng = seed::rng(seed::derive_indexed(seed, "landscape/start", i as u64));
            let start = loop {
                let p = sample_j(&mut rng);
                if p.is_interior() {
                    break p;
                }
            };
            let p = ascend(start);
            (p, f_raw(&p))
        })
        .collect();
    let mut out: Vec<Candidate> = Vec::new();
    for (p, v) in runs {
        match out.iter_mut().find(|c| c.point.distance(&p) < tol) {
            Some(c) => {
                c.hits += 1;
                if v > c.value {
                    c.point = p;
                    c.value = v;
                }
            }
            None => out.push(Candidate {
                point: p,
                value: v,
                kind: CandidateKind::Interior,
                hits: 1,
                grad_norm: None,
            }),
        }
    }
    for c in &mut out {
        c.grad_norm = grad_f(&c.point).ok().map(|g| Vector5::from(g).norm());
    }
    for p in boundary_candidates() {
        out.push(Candidate {
            point: p,
            value: f_raw(&p),
            kind: CandidateKind::Boundary,
            hits: 0,
            grad_norm: None,
        });
    }
    out.sort_by(|a, b| {
        b.value
            .total_cmp(&a.value)
            .then_with(|| a.point.to_array().partial_cmp(&b.point.to_array()).unwrap())
    });
    out
}

/// Damped Newton ascent that stays inside `J`; switches to Nelder-Mead if
/// the line search stalls before the gradient is small.
fn ascend(start: ZVector) -> ZVector {
    let mut x = start;
    let mut fx = f_raw(&x);
    for _ in 0..500 {
        let g = match grad_vec(&x) {
            Ok(g) => g,
            Err(_) => break,
        };
        if g.amax() < 1e-12 {
            return x;
        }
        let dir = match hessian_at(&x).ok().and_then(|hb| (-2.0 * hb.matrix).cholesky()) {
            Some(ch) => ch.solve(&g),
            None => g,
        };
        let mut t = 1.0;
        let mut moved = false;
        for _ in 0..80 {
            let y = ZVector::from_vector(&(x.to_vector() + dir * t));
            if y.is_interior() {
                let fy = f_raw(&y);
                if fy >= fx {
                    moved = fy > fx || y != x;
                    x = y;
                    fx = fy;
                    break;
                }
            }
            t *= 0.5;
        }
        if !moved {
            break;
        }
    }
    nelder_mead(x)
}

fn nelder_mead(start: ZVector) -> ZVector {
    let cost = |v: &Vector5<f64>| {
        let p = ZVector::from_vector(v);
        if p.is_member() {
            -f_raw(&p)
        } else {
            f64::INFINITY
        }
    };
    let x0 = start.to_vector();
    let mut simplex: Vec<(Vector5<f64>, f64)> = vec![(x0, cost(&x0))];
    for i in 0..5 {
        let mut v = x0;
        v[i] += if v[i] > 0.25 { -1e-3 } else { 1e-3 };
        simplex.push((v, cost(&v)));
    }
    for _ in 0..5000 {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if (simplex[5].1 - simplex[0].1).abs() < 1e-15 && (simplex[5].0 - simplex[0].0).amax() < 1e-12 {
            break;
        }
        let centroid = simplex[..5].iter().map(|s| s.0).sum::<Vector5<f64>>() / 5.0;
        let worst = simplex[5];
        let at = |t: f64| {
            let v = centroid + (centroid - worst.0) * t;
            (v, cost(&v))
        };
        let r = at(1.0);
        if r.1 < simplex[0].1 {
            let e = at(2.0);
            simplex[5] = if e.1 < r.1 { e } else { r };
        } else if r.1 < simplex[4].1 {
            simplex[5] = r;
        } else {
            let c = if r.1 < worst.1 { at(0.5) } else { at(-0.5) };
            if c.1 < worst.1.min(r.1) {
                simplex[5] = c;
            } else {
                let best = simplex[0].0;
                for s in simplex.iter_mut().skip(1) {
                    s.0 = best + (s.0 - best) * 0.5;
                    s.1 = cost(&s.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    ZVector::from_vector(&simplex[0].0)
}

/// A point where `d/dt f_bar(t, t)` changes sign.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DiagonalStationary {
    pub t: f64,
    pub value: f64,
    pub is_max: bool,
}

/// Scan `t -> f_bar(t, t)` on a uniform grid of `steps` cells in
/// `(0, 1/2)` using central differences of `f_bar`, and refine each sign
/// change of the derivative by bisection.
pub fn f_bar_diagonal_scan(steps: usize) -> Vec<DiagonalStationary> {
    let diag = |t: f64| f_raw(&ZVector::new(0.0, 0.0, t, t, 0.0));
    let d = |t: f64| {
        let e = 1e-6 * t.min(0.5 - t);
        (diag(t + e) - diag(t - e)) / (2.0 * e)
    };
    let grid: Vec<f64> = (1..steps).map(|i| 0.5 * i as f64 / steps as f64).collect();
    let mut out = Vec::new();
    for w in grid.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let (dlo, dhi) = (d(lo), d(hi));
        if dlo.signum() == dhi.signum() {
            continue;
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if d(mid).signum() == dlo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = 0.5 * (lo + hi);
        out.push(DiagonalStationary {
            t,
            value: diag(t),
            is_max: dlo > dhi,
        });
    }
    out
}

/// Maximum of `f_bar` over `[0, 1/2]^2`: a grid search refined by
/// Nelder-Mead on the square.
pub fn f_bar_max(grid: usize) -> ((f64, f64), f64) {
    let fb = |a: f64, c: f64| f_raw(&ZVector::new(0.0, 0.0, a, c, 0.0));
    let mut best = ((0.0, 0.0), f64::NEG_INFINITY);
    for i in 0..=grid {
        for j in 0..=grid {
            let (a, c) = (0.5 * i as f64 / grid as f64, 0.5 * j as f64 / grid as f64);
            let v = fb(a, c);
            if v > best.1 {
                best = ((a, c), v);
            }
        }
    }
    let inside = |a: f64, c: f64| (0.0..=0.5).contains(&a) && (0.0..=0.5).contains(&c);
    let (mut p, mut v) = best;
    let mut step = 0.5 / grid as f64;
    while step > 1e-13 {
        let mut improved = false;
        for (da, dc) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0), (-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0)] {
            let (a, c) = (p.0 + da * step, p.1 + dc * step);
            if inside(a, c) && fb(a, c) > v {
                p = (a, c);
                v = fb(a, c);
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (p, v)
}

/// Printed and recomputed boundary values, and the numerical resolution of
/// the two boundary cases `z = 0` and `z = 1/2`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryReport {
    /// `log(5/8)`, the value given in the literature for `f(0,0,1/2,1/2,0)`.
    pub printed_value: f64,
    pub computed_value: f64,
    /// `f(1/2,1/2,0,0,1/2)`.
    pub mirror_value: f64,
    pub diagonal_stationary: Vec<DiagonalStationary>,
    pub f_bar_argmax: (f64, f64),
    pub f_bar_max: f64,
    /// `max |f(1/2, a, 0, 0, c) - f_bar(a, c)|` over random `(a, c)`.
    pub case2_identity_err: f64,
    /// Every boundary maximum lies strictly below `log(25/8)`.
    pub below_interior_max: bool,
}

pub fn boundary_report(seed: u64) -> BoundaryReport {
    let [p, q] = boundary_candidates();
    let mut rng = seed::rng(seed::derive(seed, "landscape/case2"));
    let case2_identity_err = (0..100)
        .map(|_| {
            let (a, c) = (rng.random_range(0.0..=0.5), rng.random_range(0.0..=0.5));
            (f_raw(&ZVector::new(0.5, a, 0.0, 0.0, c)) - f_raw(&ZVector::new(0.0, 0.0, a, c, 0.0))).abs()
        })
        .fold(0.0, f64::max);
    let diagonal_stationary = f_bar_diagonal_scan(1000);
    let (f_bar_argmax, f_bar_max) = f_bar_max(200);
    let computed_value = f_raw(&p);
    let mirror_value = f_raw(&q);
    let below_interior_max = [computed_value, mirror_value, f_bar_max]
        .into_iter()
        .chain(diagonal_stationary.iter().map(|d| d.value))
        .all(|v| v < f_max());
    BoundaryReport {
        printed_value: (5.0f64 / 8.0).ln(),
        computed_value,
        mirror_value,
        diagonal_stationary,
        f_bar_argmax,
        f_bar_max,
        case2_identity_err,
        below_interior_max,
    }
}

/// A uniform point of `J` whose eight slacks all exceed `margin`.
pub fn sample_j_inside(rng: &mut seed::Rng, margin: f64) -> ZVector {
    loop {
        let p = sample_j(rng);
        if p.slacks().iter().all(|&s| s > margin) {
            return p;
        }
    }
}

/// `max |grad_f - central difference of f|` over `points` random points of
/// `J` at least `margin` from its boundary.
pub fn grad_fd_max_error(points: usize, step: f64, margin: f64, seed: u64) -> f64 {
    let mut rng = seed::rng(seed::derive(seed, "landscape/grad-fd"));
    let mut worst: f64 = 0.0;
    for _ in 0..points {
        let p = sample_j_inside(&mut rng, margin);
        let g = grad_f(&p).expect("interior");
        let x = p.to_array();
        for (i, gi) in g.iter().enumerate() {
            let (mut up, mut down) = (x, x);
            up[i] += step;
            down[i] -= step;
            let fd = (f_raw(&ZVector::from_array(up)) - f_raw(&ZVector::from_array(down))) / (2.0 * step);
            worst = worst.max((fd - gi).abs());
        }
    }
    worst
}

/// `max |exp(df/dx) - numerator/denominator|` relative, over random
/// interior points: the log form of each partial against the rational form
/// behind its stationary polynomial.
pub fn exp_grad_identity_err(points: usize, seed: u64) -> f64 {
    let mut rng = seed::rng(seed::derive(seed, "landscape/exp-grad"));
    let mut worst: f64 = 0.0;
    for _ in 0..points {
        let p = sample_j_inside(&mut rng, 1e-6);
        let g = grad_f(&p).expect("interior");
        for (gi, (num, den)) in g.iter().zip(stationary_parts(&p)) {
            worst = worst.max((gi.exp() / (num / den) - 1.0).abs());
        }
    }
    worst
}

/// Residual of the quadratic approximation at `z~ + y`.
pub fn taylor_residual(y: &YVector) -> Result<f64> {
    let p = ZVector::tilde().offset(y);
    Ok(f_of(&p)? - f_max() - HessianB::exact().quadratic_form(y))
}

/// `max |residual| / |y|^3` over `directions` random unit directions
/// scaled to `radius`.
pub fn taylor_ratio(radius: f64, directions: usize, seed: u64) -> Result<f64> {
    let mut rng = seed::rng(seed::derive(seed, "landscape/taylor"));
    let mut worst: f64 = 0.0;
    for _ in 0..directions {
        let v: Vector5<f64> = Vector5::from_fn(|_, _| rng.random_range(-1.0..1.0));
        let v = v / v.norm() * radius;
        let y = YVector::from_array([v[0], v[1], v[2], v[3], v[4]]);
        worst = worst.max(taylor_residual(&y)?.abs() / radius.powi(3));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_at_named_points() {
        let t = ZVector::tilde();
        assert!((b_of(&t).unwrap() - 1.25).abs() < 1e-15);
        assert_eq!(b_of(&ZVector::new(0.0, 0.0, 0.5, 0.5, 0.0)).unwrap(), 0.0);
        assert_eq!(b_of(&ZVector::new(0.5, 0.5, 0.0, 0.0, 0.5)).unwrap(), 2.5);
        assert!((f_of(&t).unwrap() - f_max()).abs() < 1e-14);
        assert!((f_max() - 1.1394343).abs() < 1e-7);
        assert!(f_of(&ZVector::new(0.1, 0.2, 0.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn g_at_tilde() {
        let t = ZVector::tilde();
        let g1 = g_of(&t, 1.0).unwrap();
        assert!((g1 - 1562.5 * PI.powf(-2.5)).abs() < 1e-10);
        assert!((g1 - 89.3193).abs() < 1e-4);
        assert!((g_of(&t, 40.0).unwrap() * 32.0 - g_of(&t, 10.0).unwrap()).abs() < 1e-12);
        assert!(g_of(&ZVector::new(0.25, 0.0, 0.05, 0.05, 0.05), 1.0).is_err());
    }

    #[test]
    fn gradient_and_polys_vanish_at_tilde() {
        let t = ZVector::tilde();
        assert!(grad_f(&t).unwrap().iter().all(|g| g.abs() < 1e-10));
        assert!(stationary_polys(&t).iter().all(|p| p.abs() < 1e-12));
        assert!(p6(&t).abs() < 1e-12);
        assert!(p7(0.25, 0.05).abs() < 1e-12);
    }

    #[test]
    fn dz00_two_ways() {
        let p = ZVector::new(0.25, 0.1, 0.05, 0.05, 0.05);
        assert!((grad_f(&p).unwrap()[1] - dz00_expanded(&p).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn exact_spectrum() {
        let s = spectrum_b();
        assert_eq!(s.determinant, BigRational::new((-328125).into(), 4.into()));
        for (a, b) in s.eigenvalues.iter().zip(eigenvalues_closed_form()) {
            assert!((a - b).abs() < 1e-10);
        }
        assert!((laplace_coefficient() - 25.0 / 21f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn sampler_stays_in_j() {
        let mut rng = seed::rng(5);
        assert!((0..1000).all(|_| sample_j(&mut rng).is_member()));
    }
}
