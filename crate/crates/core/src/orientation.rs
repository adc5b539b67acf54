//! Orientations of a pairing and valid (in-degree 1 or 4) orientations.
//!
//! An orientation picks, for every pair, which point is the in-point. The
//! in-degree of a vertex is the number of its in-points, so a loop always
//! adds exactly one. A valid orientation is the same thing as a
//! nowhere-zero flow over Z_3 on the underlying multigraph.

use std::collections::VecDeque;

use rand::seq::IndexedRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::pairing::{Pairing, DEGREE};
use crate::seed;

/// Largest number of pairs `count_valid` accepts unless told otherwise.
pub const DEFAULT_COUNT_CAP: usize = 40;
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Oriented pairs `[out_point, in_point]`, one per pair of the pairing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Orientation {
    arcs: Vec<[usize; 2]>,
}

impl Orientation {
    pub fn from_arcs(arcs: Vec<[usize; 2]>) -> Self {
        Orientation { arcs }
    }

    /// `flip[i] == false` orients pair `[a, b]` as `a -> b`.
    pub fn from_flips(p: &Pairing, flip: &[bool]) -> Self {
        let arcs = p
            .pairs()
            .iter()
            .zip(flip)
            .map(|(&[a, b], &f)| if f { [b, a] } else { [a, b] })
            .collect();
        Orientation { arcs }
    }

    pub fn arcs(&self) -> &[[usize; 2]] {
        &self.arcs
    }

    /// Every pair turned around.
    pub fn reversed(&self) -> Self {
        Orientation {
            arcs: self.arcs.iter().map(|&[a, b]| [b, a]).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexClass {
    /// in-degree 1
    InVertex,
    /// out-degree 1
    OutVertex,
    Violating,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub in_degrees: Vec<u8>,
    pub valid: bool,
    pub violators: Vec<usize>,
    pub classes: Vec<VertexClass>,
}

impl ValidityReport {
    pub fn out_degrees(&self) -> Vec<u8> {
        self.in_degrees.iter().map(|&d| DEGREE as u8 - d).collect()
    }

    pub fn in_vertices(&self) -> usize {
        self.count(VertexClass::InVertex)
    }

    pub fn out_vertices(&self) -> usize {
        self.count(VertexClass::OutVertex)
    }

    fn count(&self, c: VertexClass) -> usize {
        self.classes.iter().filter(|&&x| x == c).count()
    }
}

fn check_cover(p: &Pairing, o: &Orientation) -> Result<()> {
    if o.arcs.len() != p.pairs().len() {
        return domain(format!(
            "orientation has {} arcs, pairing has {} pairs",
            o.arcs.len(),
            p.pairs().len()
        ));
    }
    let partner = p.partners();
    let mut used = vec![false; p.num_points()];
    for &[a, b] in &o.arcs {
        if a >= partner.len() || b >= partner.len() || partner[a] != b || a == b {
            return domain(format!("arc [{a},{b}] is not a pair of the pairing"));
        }
        if std::mem::replace(&mut used[a.min(b)], true) {
            return domain(format!("pair {{{a},{b}}} oriented twice"));
        }
    }
    Ok(())
}

fn in_degrees(p: &Pairing, o: &Orientation) -> Vec<u8> {
    let mut indeg = vec![0u8; p.n()];
    for &[_, head] in &o.arcs {
        indeg[Pairing::vertex_of(head)] += 1;
    }
    indeg
}

pub fn validate(p: &Pairing, o: &Orientation) -> Result<ValidityReport> {
    check_cover(p, o)?;
    let in_degrees = in_degrees(p, o);
    let classes: Vec<_> = in_degrees
        .iter()
        .map(|&d| match d {
            1 => VertexClass::InVertex,
            4 => VertexClass::OutVertex,
            _ => VertexClass::Violating,
        })
        .collect();
    let violators: Vec<_> = (0..p.n())
        .filter(|&v| classes[v] == VertexClass::Violating)
        .collect();
    Ok(ValidityReport {
        valid: violators.is_empty(),
        in_degrees,
        violators,
        classes,
    })
}

/// Numbers of in-points and out-points.
pub fn in_out_point_census(p: &Pairing, o: &Orientation) -> Result<(usize, usize)> {
    check_cover(p, o)?;
    let ins = in_degrees(p, o).iter().map(|&d| d as usize).sum::<usize>();
    Ok((ins, p.num_points() - ins))
}

#[inline]
fn can_finish(indeg: u8, remaining: u8) -> bool {
    // some target in {1, 4} lies in [indeg, indeg + remaining]
    (indeg <= 1 && indeg + remaining >= 1) || (indeg <= 4 && indeg + remaining >= 4)
}

/// Exact number of valid orientations, `Y(p)`.
///
/// Loops are settled up front (each contributes one in-point and two
/// directions). The remaining pairs are assigned by depth-first search in an
/// order that closes vertices as early as possible, pruning any branch that
/// leaves some vertex unable to end at in-degree 1 or 4.
pub fn count_valid(p: &Pairing) -> Result<u64> {
    count_valid_capped(p, DEFAULT_COUNT_CAP)
}

pub fn count_valid_capped(p: &Pairing, cap: usize) -> Result<u64> {
    let m = p.pairs().len();
    if m > cap.min(62) {
        return Err(Error::SizeCap {
            what: "exact orientation count (pairs); use Monte Carlo or find_valid instead",
            limit: cap.min(62),
            got: m,
        });
    }
    let n = p.n();
    let mut indeg = vec![0u8; n];
    let mut remaining = vec![DEGREE as u8; n];
    let mut loop_factor = 1u64;
    let mut edges = Vec::new();
    for &[a, b] in p.pairs() {
        let (u, v) = (Pairing::vertex_of(a), Pairing::vertex_of(b));
        if u == v {
            loop_factor *= 2;
            indeg[u] += 1;
            remaining[u] -= 2;
        } else {
            edges.push((u, v));
        }
    }
    if (0..n).any(|v| !can_finish(indeg[v], remaining[v])) {
        return Ok(0);
    }
    let edges = closing_order(n, &edges);
    let mut search = Counter {
        edges: &edges,
        indeg,
        remaining,
    };
    Ok(loop_factor * search.run(0))
}

/// Orders edges so that the vertex with the fewest unprocessed edges among
/// those already touched is finished next.
fn closing_order(n: usize, edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut incident = vec![Vec::new(); n];
    for (i, &(u, v)) in edges.iter().enumerate() {
        incident[u].push(i);
        incident[v].push(i);
    }
    let mut left: Vec<usize> = incident.iter().map(Vec::len).collect();
    let mut touched = vec![false; n];
    let mut done = vec![false; edges.len()];
    let mut order = Vec::with_capacity(edges.len());
    while order.len() < edges.len() {
        let pick = (0..n)
            .filter(|&v| left[v] > 0)
            .min_by_key(|&v| (!touched[v], left[v], v))
            .expect("edges remain");
        for &e in &incident[pick] {
            if !done[e] {
                done[e] = true;
                let (u, v) = edges[e];
                left[u] -= 1;
                left[v] -= 1;
                touched[u] = true;
                touched[v] = true;
                order.push(edges[e]);
            }
        }
    }
    order
}

struct Counter<'a> {
    edges: &'a [(usize, usize)],
    indeg: Vec<u8>,
    remaining: Vec<u8>,
}

impl Counter<'_> {
    fn run(&mut self, i: usize) -> u64 {
        let Some(&(u, v)) = self.edges.get(i) else {
            return 1;
        };
        self.remaining[u] -= 1;
        self.remaining[v] -= 1;
        let mut total = 0;
        for head in [u, v] {
            let tail = if head == u { v } else { u };
            self.indeg[head] += 1;
            if can_finish(self.indeg[head], self.remaining[head])
                && can_finish(self.indeg[tail], self.remaining[tail])
            {
                total += self.run(i + 1);
            }
            self.indeg[head] -= 1;
        }
        self.remaining[u] += 1;
        self.remaining[v] += 1;
        total
    }
}

/// Counts valid orientations by trying all `2^m` direction assignments.
pub fn count_valid_brute_force(p: &Pairing) -> u64 {
    let m = p.pairs().len();
    assert!(m <= 24, "brute force is for tiny pairings");
    let mut count = 0;
    for mask in 0u64..(1 << m) {
        let mut indeg = vec![0u8; p.n()];
        for (i, &[a, b]) in p.pairs().iter().enumerate() {
            let head = if mask >> i & 1 == 1 { a } else { b };
            indeg[Pairing::vertex_of(head)] += 1;
        }
        if indeg.iter().all(|&d| d == 1 || d == 4) {
            count += 1;
        }
    }
    count
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FindOutcome {
    Found {
        orientation: Orientation,
        steps: u64,
        restarts: u64,
    },
    Failed {
        best_potential: u64,
        steps: u64,
        restarts: u64,
    },
}

impl FindOutcome {
    pub fn orientation(&self) -> Option<&Orientation> {
        match self {
            FindOutcome::Found { orientation, .. } => Some(orientation),
            FindOutcome::Failed { .. } => None,
        }
    }
}

/// Distance from an in-degree to the nearest of 1 and 4.
#[inline]
fn defect(d: u8) -> i64 {
    match d {
        0 | 2 | 3 | 5 => 1,
        _ => 0,
    }
}

/// Change of the potential when a vertex of in-degree `d` gains an in-point.
#[inline]
fn gain(d: u8) -> i64 {
    defect(d + 1) - defect(d)
}

/// Change of the potential when a vertex of in-degree `d` loses an in-point.
#[inline]
fn loss(d: u8) -> i64 {
    defect(d - 1) - defect(d)
}

/// Local search for a valid orientation.
///
/// The potential is the number of vertices whose in-degree is not 1 or 4.
/// Each step reverses a directed path `s -> ... -> t`, which moves one unit
/// of in-degree from `t` to `s` and leaves inner vertices alone; paths are
/// found by breadth-first search along out-arcs and the best available
/// change is taken. Single-arc reversals are the length-one case. When no
/// improving path exists a random neutral path is reversed; after
/// `50 n` steps without a new best potential the orientation is redrawn.
pub fn find_valid(p: &Pairing, budget: u64, seed: u64) -> FindOutcome {
    Search::new(p, seed).run(budget)
}

struct Search<'a> {
    p: &'a Pairing,
    rng: seed::Rng,
    /// index (0 or 1) of the in-point within each pair
    head: Vec<u8>,
    indeg: Vec<u8>,
    /// vertices of the two points of each pair
    pair_vertices: Vec<[u32; 2]>,
    /// non-loop pairs at each vertex
    incident: Vec<Vec<u32>>,
    potential: i64,
    // BFS scratch
    parent: Vec<u32>,
    stamp: Vec<u32>,
    epoch: u32,
    queue: VecDeque<usize>,
}

const NONE: u32 = u32::MAX;

impl<'a> Search<'a> {
    fn new(p: &'a Pairing, seed: u64) -> Self {
        let n = p.n();
        let mut incident = vec![Vec::with_capacity(DEGREE); n];
        for (i, &[a, b]) in p.pairs().iter().enumerate() {
            let (u, v) = (Pairing::vertex_of(a), Pairing::vertex_of(b));
            if u != v {
                incident[u].push(i as u32);
                incident[v].push(i as u32);
            }
        }
        let pair_vertices = p
            .pairs()
            .iter()
            .map(|&[a, b]| [Pairing::vertex_of(a) as u32, Pairing::vertex_of(b) as u32])
            .collect();
        let mut s = Search {
            p,
            pair_vertices,
            rng: seed::rng(seed),
            head: vec![0; p.pairs().len()],
            indeg: vec![0; n],
            incident,
            potential: 0,
            parent: vec![NONE; n],
            stamp: vec![0; n],
            epoch: 0,
            queue: VecDeque::new(),
        };
        s.randomize();
        s
    }

    #[inline]
    fn ends(&self, e: usize) -> (usize, usize) {
        let pair = self.pair_vertices[e];
        let h = self.head[e] as usize;
        (pair[1 - h] as usize, pair[h] as usize)
    }

    fn randomize(&mut self) {
        for h in &mut self.head {
            *h = self.rng.random_range(0..2);
        }
        self.indeg.iter_mut().for_each(|d| *d = 0);
        for e in 0..self.head.len() {
            let (_, to) = self.ends(e);
            self.indeg[to] += 1;
        }
        self.potential = self.indeg.iter().map(|&d| defect(d)).sum();
    }

    fn orientation(&self) -> Orientation {
        let arcs = self
            .p
            .pairs()
            .iter()
            .zip(&self.head)
            .map(|(&pair, &h)| [pair[1 - h as usize], pair[h as usize]])
            .collect();
        Orientation { arcs }
    }

    /// Breadth-first search from `sources`, along out-arcs (`forward`) or
    /// in-arcs. Returns the first reached vertex accepted by `want`, or a
    /// uniformly chosen one when `pick_random` is set.
    fn bfs(
        &mut self,
        sources: &[usize],
        forward: bool,
        want: impl Fn(u8) -> bool,
        pick_random: bool,
    ) -> Option<usize> {
        self.epoch += 1;
        if self.epoch == u32::MAX {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        self.queue.clear();
        for &s in sources {
            if self.stamp[s] != self.epoch {
                self.stamp[s] = self.epoch;
                self.parent[s] = NONE;
                self.queue.push_back(s);
            }
        }
        let mut found = Vec::new();
        while let Some(u) = self.queue.pop_front() {
            for k in 0..self.incident[u].len() {
                let e = self.incident[u][k] as usize;
                let (from, to) = self.ends(e);
                let (near, far) = if forward { (from, to) } else { (to, from) };
                if near != u || self.stamp[far] == self.epoch {
                    continue;
                }
                self.stamp[far] = self.epoch;
                self.parent[far] = e as u32;
                if want(self.indeg[far]) {
                    if !pick_random {
                        return Some(far);
                    }
                    found.push(far);
                }
                self.queue.push_back(far);
            }
        }
        found.choose(&mut self.rng).copied()
    }

    /// Reverses the tree path found by the last search. `end` is the vertex
    /// returned by [`Self::bfs`]; for a forward search the path runs from a
    /// source to `end`, for a backward search from `end` to a source.
    fn reverse_tree_path(&mut self, end: usize, forward: bool) {
        let mut v = end;
        while self.parent[v] != NONE {
            let e = self.parent[v] as usize;
            let (from, to) = self.ends(e);
            self.head[e] ^= 1;
            v = if forward { from } else { to };
        }
        let (s, t) = if forward { (v, end) } else { (end, v) };
        self.potential += gain(self.indeg[s]) + loss(self.indeg[t]);
        self.indeg[s] += 1;
        self.indeg[t] -= 1;
    }

    fn vertices_where(&self, f: impl Fn(u8) -> bool) -> Vec<usize> {
        (0..self.indeg.len()).filter(|&v| f(self.indeg[v])).collect()
    }

    fn try_forward(&mut self, sources: &[usize], want: impl Fn(u8) -> bool) -> bool {
        if sources.is_empty() {
            return false;
        }
        match self.bfs(sources, true, want, false) {
            Some(t) => {
                self.reverse_tree_path(t, true);
                true
            }
            None => false,
        }
    }

    /// One step; returns false if nothing could be reversed without making
    /// the potential worse.
    fn step(&mut self) -> bool {
        let takers = self.vertices_where(|d| gain(d) < 0);
        // nearest vertex that can give from one random taker, which is
        // cheap while takers are plentiful
        if let Some(&s) = takers.choose(&mut self.rng) {
            if self.try_forward(&[s], |d| d > 0 && loss(d) <= 0) {
                return true;
            }
        }
        if self.try_forward(&takers, |d| d > 0 && loss(d) < 0) {
            return true;
        }
        // vertices at 2 both give and take, so again one source at a time
        let neutral_takers = self.vertices_where(|d| d < DEGREE as u8 && gain(d) == 0);
        if let Some(&s) = neutral_takers.choose(&mut self.rng) {
            if self.try_forward(&[s], |d| d > 0 && loss(d) < 0) {
                return true;
            }
        }
        // A vertex at 2 that takes from a vertex at 3 swaps their roles;
        // the taker can then often reach the giver along another path.
        if self.rng.random_bool(0.5) && !neutral_takers.is_empty() {
            if let Some(t) = self.bfs(&neutral_takers, true, |d| d == 3, true) {
                self.reverse_tree_path(t, true);
                return true;
            }
        }
        // sideways move around a random defective vertex
        let defective = self.vertices_where(|d| defect(d) > 0);
        let Some(&v) = defective.choose(&mut self.rng) else {
            return false;
        };
        let d = self.indeg[v];
        if d < DEGREE as u8 && gain(d) < 0 {
            if let Some(t) = self.bfs(&[v], true, |x| x > 0 && gain(d) + loss(x) <= 0, true) {
                self.reverse_tree_path(t, true);
                return true;
            }
        }
        if d > 0 && loss(d) < 0 {
            if let Some(s) = self.bfs(&[v], false, |x| x < DEGREE as u8 && gain(x) + loss(d) <= 0, true) {
                self.reverse_tree_path(s, false);
                return true;
            }
        }
        false
    }

    fn run(mut self, budget: u64) -> FindOutcome {
        let stagnation_limit = 50 * self.indeg.len() as u64;
        let mut best = self.potential;
        let mut since_best = 0u64;
        let mut restarts = 0u64;
        let mut steps = 0u64;
        while steps < budget {
            if self.potential == 0 {
                return FindOutcome::Found {
                    orientation: self.orientation(),
                    steps,
                    restarts,
                };
            }
            steps += 1;
            let before = self.potential;
            let moved = self.step();
            if self.potential < best {
                best = self.potential;
                since_best = 0;
            } else {
                since_best += 1;
            }
            if !moved || (since_best > stagnation_limit && self.potential >= before) {
                self.randomize();
                restarts += 1;
                since_best = 0;
            }
        }
        if self.potential == 0 {
            return FindOutcome::Found {
                orientation: self.orientation(),
                steps,
                restarts,
            };
        }
        FindOutcome::Failed {
            best_potential: best as u64,
            steps,
            restarts,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parallel5() -> Pairing {
        Pairing::new(2, (0..5).map(|i| [i, 5 + i]).collect()).unwrap()
    }

    /// loop at each vertex plus three connecting edges
    fn loops_plus_three() -> Pairing {
        Pairing::new(2, vec![[0, 1], [5, 6], [2, 7], [3, 8], [4, 9]]).unwrap()
    }

    /// two loops at each vertex plus one connecting edge (no valid orientation)
    fn double_loops() -> Pairing {
        Pairing::new(2, vec![[0, 1], [2, 3], [5, 6], [7, 8], [4, 9]]).unwrap()
    }

    #[test]
    fn validity_on_parallel_edges() {
        let p = parallel5();
        // one arc towards vertex 0
        let flips = [true, false, false, false, false];
        let r = validate(&p, &Orientation::from_flips(&p, &flips)).unwrap();
        assert!(r.valid);
        assert_eq!(r.classes[0], VertexClass::InVertex);
        assert_eq!(r.in_degrees, vec![1, 4]);
        assert_eq!(r.out_degrees(), vec![4, 1]);

        let flips = [true, true, false, false, false];
        let r = validate(&p, &Orientation::from_flips(&p, &flips)).unwrap();
        assert!(!r.valid);
        assert_eq!(r.violators, vec![0, 1]);
        assert_eq!(r.in_degrees[0], 2);
    }

    #[test]
    fn validate_rejects_foreign_arcs() {
        let p = parallel5();
        let bad = Orientation::from_arcs(vec![[0, 1], [1, 6], [2, 7], [3, 8], [4, 9]]);
        assert!(validate(&p, &bad).is_err());
        let short = Orientation::from_arcs(vec![[0, 5]]);
        assert!(validate(&p, &short).is_err());
        let dup = Orientation::from_arcs(vec![[0, 5], [5, 0], [2, 7], [3, 8], [4, 9]]);
        assert!(validate(&p, &dup).is_err());
    }

    #[test]
    fn census() {
        let p = parallel5();
        let o = Orientation::from_flips(&p, &[false; 5]);
        assert_eq!(in_out_point_census(&p, &o).unwrap(), (5, 5));
        let p = crate::pairing::sample_pairing(10, 4).unwrap();
        let o = Orientation::from_flips(&p, &[true; 25]);
        let (ins, outs) = in_out_point_census(&p, &o).unwrap();
        assert_eq!((ins, outs), (25, 25));
        let r = validate(&p, &o).unwrap();
        assert_eq!(r.in_degrees.iter().map(|&d| d as usize).sum::<usize>(), ins);
    }

    #[test]
    fn small_counts() {
        assert_eq!(count_valid(&parallel5()).unwrap(), 10);
        assert_eq!(count_valid(&loops_plus_three()).unwrap(), 8);
        assert_eq!(count_valid(&double_loops()).unwrap(), 0);
        for p in [parallel5(), loops_plus_three(), double_loops()] {
            assert_eq!(count_valid(&p).unwrap(), count_valid_brute_force(&p));
        }
    }

    #[test]
    fn count_cap() {
        let p = crate::pairing::sample_pairing(18, 1).unwrap();
        assert!(matches!(count_valid(&p), Err(Error::SizeCap { .. })));
    }

    #[test]
    fn every_n2_pairing_matches_brute_force() {
        for p in crate::pairing::all_pairings(2).unwrap() {
            let y = count_valid(&p).unwrap();
            assert_eq!(y, count_valid_brute_force(&p));
            if p.to_multigraph().loops_at(0) + p.to_multigraph().loops_at(1) > 0 {
                assert_eq!(y % 2, 0);
            }
        }
    }

    #[test]
    fn finder_on_small_cases() {
        let p = parallel5();
        let out = find_valid(&p, 10_000, 1);
        let o = out.orientation().expect("parallel edges have valid orientations");
        assert!(validate(&p, o).unwrap().valid);

        match find_valid(&double_loops(), 5_000, 1) {
            FindOutcome::Failed { best_potential, .. } => assert!(best_potential > 0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn finder_on_random_pairings() {
        for seed in 0..30 {
            let p = crate::pairing::sample_pairing(12, seed).unwrap();
            let y = count_valid(&p).unwrap();
            let out = find_valid(&p, 200_000, seed);
            match out.orientation() {
                Some(o) => assert!(validate(&p, o).unwrap().valid),
                None => assert_eq!(y, 0, "seed {seed}: missed a solution"),
            }
        }
    }
}
