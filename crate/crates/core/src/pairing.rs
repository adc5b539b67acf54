//! The pairing (configuration) model on `5n` points.
//!
//! Point `p` belongs to vertex `p / 5`. A [`Pairing`] is a perfect matching
//! of the points; its [`MultiGraph`] keeps loops and parallel edges.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_traits::One;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::seed;

pub const DEGREE: usize = 5;

/// Default largest cycle length tracked by [`cycle_counts`].
pub const DEFAULT_MAX_CYCLE: usize = 8;

/// `M(s)`, the number of perfect matchings of `s` points: `(s-1)!!`.
pub fn num_pairings(s: u64) -> Result<BigUint> {
    if s == 0 || s % 2 == 1 {
        return domain(format!("M(s) needs an even positive s, got {s}"));
    }
    Ok((1..s).step_by(2).fold(BigUint::one(), |acc, k| acc * k))
}

pub(crate) fn check_even(n: usize) -> Result<()> {
    if n == 0 || n % 2 == 1 {
        return domain(format!("n must be even and positive, got {n}"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PairingRepr", into = "PairingRepr")]
pub struct Pairing {
    n: usize,
    pairs: Vec<[usize; 2]>,
}

#[derive(Serialize, Deserialize)]
struct PairingRepr {
    n: usize,
    pairs: Vec<[usize; 2]>,
}

impl TryFrom<PairingRepr> for Pairing {
    type Error = Error;
    fn try_from(r: PairingRepr) -> Result<Self> {
        Pairing::new(r.n, r.pairs)
    }
}

impl From<Pairing> for PairingRepr {
    fn from(p: Pairing) -> Self {
        PairingRepr {
            n: p.n,
            pairs: p.pairs,
        }
    }
}

impl Pairing {
    /// Checks that `pairs` is a perfect matching of the `5n` points.
    pub fn new(n: usize, pairs: Vec<[usize; 2]>) -> Result<Self> {
        check_even(n)?;
        let points = DEGREE * n;
        if pairs.len() != points / 2 {
            return domain(format!(
                "expected {} pairs, got {}",
                points / 2,
                pairs.len()
            ));
        }
        let mut seen = vec![false; points];
        for &[a, b] in &pairs {
            for p in [a, b] {
                if p >= points {
                    return domain(format!("point {p} out of range 0..{points}"));
                }
                if std::mem::replace(&mut seen[p], true) {
                    return domain(format!("point {p} appears twice"));
                }
            }
        }
        Ok(Pairing { n, pairs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_points(&self) -> usize {
        DEGREE * self.n
    }

    pub fn pairs(&self) -> &[[usize; 2]] {
        &self.pairs
    }

    pub fn vertex_of(point: usize) -> usize {
        point / DEGREE
    }

    /// `partner[p]` is the point matched with `p`.
    pub fn partners(&self) -> Vec<usize> {
        let mut partner = vec![0; self.num_points()];
        for &[a, b] in &self.pairs {
            partner[a] = b;
            partner[b] = a;
        }
        partner
    }

    /// Pairs sorted, each as `[min, max]`; equal pairings have equal keys.
    pub fn canonical(&self) -> Vec<[usize; 2]> {
        let mut v: Vec<_> = self
            .pairs
            .iter()
            .map(|&[a, b]| [a.min(b), a.max(b)])
            .collect();
        v.sort_unstable();
        v
    }

    pub fn to_multigraph(&self) -> MultiGraph {
        MultiGraph::from_pairs(
            self.n,
            self.pairs
                .iter()
                .map(|&[a, b]| (Self::vertex_of(a), Self::vertex_of(b))),
        )
    }
}

/// Uniform random pairing of `5n` points.
///
/// The front point of the unmatched pool is matched with a uniformly chosen
/// other unmatched point; every perfect matching is equally likely.
pub fn sample_pairing(n: usize, seed: u64) -> Result<Pairing> {
    check_even(n)?;
    let mut rng = seed::rng(seed);
    let mut pairs = Vec::with_capacity(DEGREE * n / 2);
    draw_pairs(n, &mut rng, |a, b| {
        pairs.push([a, b]);
        true
    });
    Ok(Pairing { n, pairs })
}

/// Runs the sequential matching, handing each pair to `emit`; stops early
/// when `emit` returns false. Returns whether the run completed.
fn draw_pairs(n: usize, rng: &mut seed::Rng, mut emit: impl FnMut(usize, usize) -> bool) -> bool {
    let s = DEGREE * n;
    let mut pool: Vec<usize> = (0..s).collect();
    let mut i = 0;
    while i < s {
        let j = rng.random_range(i + 1..s);
        pool.swap(i + 1, j);
        if !emit(pool[i], pool[i + 1]) {
            return false;
        }
        i += 2;
    }
    true
}

/// Samples pairings until one is simple, i.e. a uniform simple 5-regular
/// graph. Attempt `i` uses a seed derived from `(seed, i)`; each attempt is
/// abandoned at the first loop or repeated edge.
pub fn sample_simple_regular(n: usize, seed: u64, max_attempts: usize) -> Result<Pairing> {
    check_even(n)?;
    for attempt in 0..max_attempts {
        let mut rng = seed::rng(seed::derive_indexed(seed, "simple-attempt", attempt as u64));
        if let Some(p) = try_simple(n, &mut rng) {
            return Ok(p);
        }
    }
    Err(Error::RetryExhausted {
        what: "no simple pairing within the attempt budget",
        attempts: max_attempts,
    })
}

/// One rejection-sampling attempt: is a uniform pairing simple? Stops at
/// the first loop or repeated edge.
pub fn simple_trial(n: usize, seed: u64) -> Result<bool> {
    check_even(n)?;
    Ok(try_simple(n, &mut seed::rng(seed)).is_some())
}

/// Mean and standard error of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl Estimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let m = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / m;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0).max(1.0);
        Estimate {
            mean,
            stderr: (var / m).sqrt(),
            samples: xs.len(),
        }
    }

    /// `|mean - target|` in standard errors.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.mean - target).abs() / self.stderr
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CycleStats {
    pub n: usize,
    pub loops: Estimate,
    pub double_edges: Estimate,
    /// Fraction of the pairings above that were simple.
    pub simple: Estimate,
}

/// Sample `samples` uniform pairings on `n` vertices (sample `i` seeded by
/// `(seed, i)`) and estimate the means of `X1`, `X2` and `P(simple)`.
pub fn mc_cycle_stats(n: usize, samples: usize, seed: u64) -> Result<CycleStats> {
    use rayon::prelude::*;
    check_even(n)?;
    let rows: Vec<[f64; 3]> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let p = sample_pairing(n, seed::derive_indexed(seed, "cycle-stats", i as u64))?;
            let g = p.to_multigraph();
            let x1 = count_k_cycles(&g, 1)? as f64;
            let x2 = count_k_cycles(&g, 2)? as f64;
            Ok([x1, x2, (x1 == 0.0 && x2 == 0.0) as u8 as f64])
        })
        .collect::<Result<_>>()?;
    let col = |c: usize| Estimate::from_samples(&rows.iter().map(|r| r[c]).collect::<Vec<_>>());
    Ok(CycleStats {
        n,
        loops: col(0),
        double_edges: col(1),
        simple: col(2),
    })
}

/// `P(simple)` from `trials` early-stopped attempts.
pub fn mc_simple_probability(n: usize, trials: usize, seed: u64) -> Result<Estimate> {
    use rayon::prelude::*;
    check_even(n)?;
    let hits: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| simple_trial(n, seed::derive_indexed(seed, "simple-trial", i as u64)).map(|b| b as u8 as f64))
        .collect::<Result<_>>()?;
    Ok(Estimate::from_samples(&hits))
}

fn try_simple(n: usize, rng: &mut seed::Rng) -> Option<Pairing> {
    let mut nbrs: Vec<[usize; DEGREE]> = vec![[usize::MAX; DEGREE]; n];
    let mut deg = vec![0u8; n];
    let mut pairs = Vec::with_capacity(DEGREE * n / 2);
    let done = draw_pairs(n, rng, |a, b| {
        let (u, v) = (a / DEGREE, b / DEGREE);
        if u == v || nbrs[u][..deg[u] as usize].contains(&v) {
            return false;
        }
        nbrs[u][deg[u] as usize] = v;
        nbrs[v][deg[v] as usize] = u;
        deg[u] += 1;
        deg[v] += 1;
        pairs.push([a, b]);
        true
    });
    done.then_some(Pairing { n, pairs })
}

/// Every pairing of `5n` points, in lexicographic order. Capped at `n = 2`
/// (945 pairings); `n = 4` already has 654729075.
pub fn all_pairings(n: usize) -> Result<Vec<Pairing>> {
    check_even(n)?;
    if n > 2 {
        return Err(Error::SizeCap {
            what: "pairing enumeration (n)",
            limit: 2,
            got: n,
        });
    }
    let s = DEGREE * n;
    let mut out = Vec::new();
    let mut used = vec![false; s];
    let mut cur = Vec::with_capacity(s / 2);
    fn rec(used: &mut [bool], cur: &mut Vec<[usize; 2]>, out: &mut Vec<Vec<[usize; 2]>>) {
        let Some(a) = used.iter().position(|&u| !u) else {
            out.push(cur.clone());
            return;
        };
        used[a] = true;
        for b in a + 1..used.len() {
            if !used[b] {
                used[b] = true;
                cur.push([a, b]);
                rec(used, cur, out);
                cur.pop();
                used[b] = false;
            }
        }
        used[a] = false;
    }
    let mut raw = Vec::new();
    rec(&mut used, &mut cur, &mut raw);
    out.extend(raw.into_iter().map(|pairs| Pairing { n, pairs }));
    Ok(out)
}

/// A multigraph on `n` vertices. A loop adds 2 to the degree of its vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "MultiGraphRepr", try_from = "MultiGraphRepr")]
pub struct MultiGraph {
    n: usize,
    loops: Vec<u32>,
    /// Non-loop neighbours of each vertex with edge multiplicities, sorted.
    adj: Vec<Vec<(usize, u32)>>,
}

#[derive(Serialize, Deserialize)]
struct MultiGraphRepr {
    n: usize,
    /// `[u, v, multiplicity]` with `u <= v`; `u == v` is a loop.
    edges: Vec<[usize; 3]>,
}

impl From<MultiGraph> for MultiGraphRepr {
    fn from(g: MultiGraph) -> Self {
        MultiGraphRepr {
            n: g.n,
            edges: g
                .edges()
                .into_iter()
                .map(|(u, v, m)| [u, v, m as usize])
                .collect(),
        }
    }
}

impl TryFrom<MultiGraphRepr> for MultiGraph {
    type Error = Error;
    fn try_from(r: MultiGraphRepr) -> Result<Self> {
        let mut list = Vec::new();
        for [u, v, m] in r.edges {
            if u >= r.n || v >= r.n {
                return domain(format!("edge ({u},{v}) out of range"));
            }
            list.extend(std::iter::repeat_n((u, v), m));
        }
        let g = MultiGraph::from_pairs(r.n, list);
        if let Some(v) = (0..g.n).find(|&v| g.degree(v) != DEGREE) {
            return domain(format!("vertex {v} has degree {}", g.degree(v)));
        }
        Ok(g)
    }
}

impl MultiGraph {
    pub fn from_pairs(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut loops = vec![0u32; n];
        let mut mult: BTreeMap<(usize, usize), u32> = BTreeMap::new();
        for (u, v) in edges {
            if u == v {
                loops[u] += 1;
            } else {
                *mult.entry((u.min(v), u.max(v))).or_default() += 1;
            }
        }
        let mut adj = vec![Vec::new(); n];
        for (&(u, v), &m) in &mult {
            adj[u].push((v, m));
            adj[v].push((u, m));
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        MultiGraph { n, loops, adj }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self, v: usize) -> usize {
        2 * self.loops[v] as usize + self.adj[v].iter().map(|&(_, m)| m as usize).sum::<usize>()
    }

    pub fn loops_at(&self, v: usize) -> u32 {
        self.loops[v]
    }

    /// Edge multiplicity between distinct vertices `u` and `v`.
    pub fn multiplicity(&self, u: usize, v: usize) -> u32 {
        if u == v {
            return self.loops[u];
        }
        self.adj[u]
            .binary_search_by_key(&v, |&(w, _)| w)
            .map(|i| self.adj[u][i].1)
            .unwrap_or(0)
    }

    pub fn neighbours(&self, v: usize) -> &[(usize, u32)] {
        &self.adj[v]
    }

    /// `(u, v, multiplicity)` with `u <= v`, loops included.
    pub fn edges(&self) -> Vec<(usize, usize, u32)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            if self.loops[u] > 0 {
                out.push((u, u, self.loops[u]));
            }
            out.extend(
                self.adj[u]
                    .iter()
                    .filter(|&&(v, _)| v > u)
                    .map(|&(v, m)| (u, v, m)),
            );
        }
        out
    }

    pub fn num_edges(&self) -> usize {
        self.edges().iter().map(|&(_, _, m)| m as usize).sum()
    }

    pub fn is_simple(&self) -> bool {
        self.loops.iter().all(|&l| l == 0) && self.adj.iter().flatten().all(|&(_, m)| m == 1)
    }
}

/// Number of `k`-cycles, `X_k`.
///
/// Loops are 1-cycles and each pair of parallel edges is a 2-cycle. For
/// `k >= 3` a cycle is a cyclic sequence of `k` distinct vertices, counted
/// once up to rotation and reflection and weighted by the product of the
/// multiplicities of its edges.
pub fn count_k_cycles(g: &MultiGraph, k: usize) -> Result<u64> {
    match k {
        0 => domain("cycle length must be positive"),
        1 => Ok(g.loops.iter().map(|&l| u64::from(l)).sum()),
        2 => Ok(g
            .edges()
            .iter()
            .filter(|&&(u, v, _)| u != v)
            .map(|&(_, _, m)| u64::from(m) * u64::from(m.saturating_sub(1)) / 2)
            .sum()),
        _ => Ok(long_cycles(g, k)),
    }
}

fn long_cycles(g: &MultiGraph, k: usize) -> u64 {
    if k > g.n {
        return 0;
    }
    let mut on_path = vec![false; g.n];
    let mut total = 0u64;
    // Start at the smallest vertex of the cycle; the second vertex is smaller
    // than the last one, which fixes the direction.
    for start in 0..g.n {
        on_path[start] = true;
        for &(second, m) in &g.adj[start] {
            if second > start {
                on_path[second] = true;
                total += u64::from(m) * extend(g, start, second, second, k - 2, &mut on_path);
                on_path[second] = false;
            }
        }
        on_path[start] = false;
    }
    total
}

fn extend(g: &MultiGraph, start: usize, second: usize, cur: usize, left: usize, on_path: &mut [bool]) -> u64 {
    if left == 0 {
        if cur > second {
            return u64::from(g.multiplicity(cur, start));
        }
        return 0;
    }
    let mut total = 0;
    for &(next, m) in &g.adj[cur] {
        if next > start && !on_path[next] {
            on_path[next] = true;
            total += u64::from(m) * extend(g, start, second, next, left - 1, on_path);
            on_path[next] = false;
        }
    }
    total
}

/// Cycle counts `X_1..X_max_k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleCountVector {
    pub counts: Vec<u64>,
}

impl CycleCountVector {
    /// `X_k` for `k >= 1`.
    pub fn get(&self, k: usize) -> u64 {
        self.counts[k - 1]
    }
}

pub fn cycle_counts(g: &MultiGraph, max_k: usize) -> Result<CycleCountVector> {
    if max_k == 0 {
        return domain("max cycle length must be positive");
    }
    let counts = (1..=max_k)
        .map(|k| count_k_cycles(g, k))
        .collect::<Result<_>>()?;
    Ok(CycleCountVector { counts })
}

/// Index of each pairing of `all_pairings(n)` by canonical form.
pub fn pairing_index(all: &[Pairing]) -> HashMap<Vec<[usize; 2]>, usize> {
    all.iter()
        .enumerate()
        .map(|(i, p)| (p.canonical(), i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parallel5() -> Pairing {
        Pairing::new(2, (0..5).map(|i| [i, 5 + i]).collect()).unwrap()
    }

    #[test]
    fn matchings_count() {
        assert_eq!(num_pairings(2).unwrap(), BigUint::from(1u32));
        assert_eq!(num_pairings(6).unwrap(), BigUint::from(15u32));
        assert_eq!(num_pairings(10).unwrap(), BigUint::from(945u32));
        assert!(num_pairings(7).is_err());
        assert!(num_pairings(0).is_err());
        // recurrence M(s) = (s-1) M(s-2)
        for s in (4..40u64).step_by(2) {
            assert_eq!(num_pairings(s).unwrap(), num_pairings(s - 2).unwrap() * (s - 1));
        }
    }

    #[test]
    fn enumeration_size_matches_m() {
        assert_eq!(all_pairings(2).unwrap().len(), 945);
        let idx = pairing_index(&all_pairings(2).unwrap());
        assert_eq!(idx.len(), 945);
    }

    #[test]
    fn sampled_pairing_invariants() {
        let p = sample_pairing(2, 3).unwrap();
        assert_eq!(p.pairs().len(), 5);
        for seed in 0..20 {
            let p = sample_pairing(10, seed).unwrap();
            assert!(Pairing::new(10, p.pairs().to_vec()).is_ok());
            let g = p.to_multigraph();
            assert!((0..10).all(|v| g.degree(v) == 5));
            assert_eq!(g.num_edges(), 25);
        }
        assert_eq!(sample_pairing(100, 9).unwrap(), sample_pairing(100, 9).unwrap());
        assert!(sample_pairing(3, 0).is_err());
    }

    #[test]
    fn rejects_bad_pairs() {
        assert!(Pairing::new(2, vec![[0, 1], [1, 2], [3, 4], [5, 6], [7, 8]]).is_err());
        assert!(Pairing::new(2, vec![[0, 1]]).is_err());
        assert!(Pairing::new(2, vec![[0, 1], [2, 3], [4, 5], [6, 7], [8, 10]]).is_err());
    }

    #[test]
    fn multigraph_shapes() {
        let g = parallel5().to_multigraph();
        assert_eq!(g.multiplicity(0, 1), 5);
        assert!(!g.is_simple());
        assert_eq!(count_k_cycles(&g, 2).unwrap(), 10);
        assert_eq!(count_k_cycles(&g, 1).unwrap(), 0);

        let p = Pairing::new(2, vec![[0, 1], [5, 6], [2, 7], [3, 8], [4, 9]]).unwrap();
        let g = p.to_multigraph();
        assert_eq!(g.loops_at(0), 1);
        assert_eq!(count_k_cycles(&g, 1).unwrap(), 2);
        assert_eq!(g.degree(0), 5);
        assert!(count_k_cycles(&g, 0).is_err());
    }

    fn complete_graph_6() -> MultiGraph {
        let mut e = Vec::new();
        for u in 0..6 {
            for v in u + 1..6 {
                e.push((u, v));
            }
        }
        MultiGraph::from_pairs(6, e)
    }

    #[test]
    fn cycles_of_k6() {
        // K6 has C(6,k)(k-1)!/2 cycles of length k
        let g = complete_graph_6();
        assert!(g.is_simple());
        let want = [0, 0, 20, 45, 72, 60];
        for k in 1..=6 {
            assert_eq!(count_k_cycles(&g, k).unwrap(), want[k - 1], "k={k}");
        }
        assert_eq!(count_k_cycles(&g, 7).unwrap(), 0);
    }

    #[test]
    fn parallel_edges_multiply_cycle_count() {
        // triangle with one doubled edge: two distinct triangles
        let g = MultiGraph::from_pairs(3, vec![(0, 1), (0, 1), (1, 2), (2, 0)]);
        assert_eq!(count_k_cycles(&g, 3).unwrap(), 2);
        assert_eq!(count_k_cycles(&g, 2).unwrap(), 1);
    }

    #[test]
    fn simple_regular_sampling() {
        let p = sample_simple_regular(10, 5, 10_000).unwrap();
        let g = p.to_multigraph();
        assert!(g.is_simple());
        assert!((0..10).all(|v| g.degree(v) == 5));
        assert!(matches!(
            sample_simple_regular(2, 5, 10_000),
            Err(Error::RetryExhausted { .. })
        ));
    }

    #[test]
    fn multigraph_json_round_trip() {
        let g = sample_pairing(6, 1).unwrap().to_multigraph();
        let s = serde_json::to_string(&g).unwrap();
        let back: MultiGraph = serde_json::from_str(&s).unwrap();
        assert_eq!(g, back);
        assert!(serde_json::from_str::<MultiGraph>(r#"{"n":2,"edges":[[0,1,4]]}"#).is_err());
    }
}
