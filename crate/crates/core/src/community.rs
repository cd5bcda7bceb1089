//! Exact query-centered community search.
//!
//! The query-biased degree of `u` inside a set `C` is the TPPR mass of its
//! neighbours in `C`. The target community is the largest connected set
//! containing the queries whose minimum query-biased degree is maximal.
//! Because shrinking a set never raises any degree, greedily peeling the
//! minimum-degree vertex visits an optimal set.

use std::collections::VecDeque;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::graph::{TemporalGraph, VertexId};
use crate::par;
use crate::tppr::{compute_tppr_multi_with, QueryContext, TpprVector};
use crate::transition::{Decay, TransitionModel};

/// Degree values closer than this are treated as equal when deciding
/// whether a snapshot improves on the best one. Scores are probabilities,
/// so this sits far above accumulated rounding and far below any real gap.
pub const SCORE_TOLERANCE: f64 = 1e-12;

pub const BRUTE_FORCE_MAX_VERTICES: usize = 12;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Egr,
    Als,
    Baseline,
    BruteForce,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Egr => "egr",
            Algorithm::Als => "als",
            Algorithm::Baseline => "baseline",
            Algorithm::BruteForce => "brute",
        }
    }
}

#[derive(Copy, Clone, Debug, Default, PartialEq)]
pub struct Timings {
    pub tppr: Duration,
    pub search: Duration,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CommunityResult {
    /// Sorted by vertex id.
    pub community: Vec<VertexId>,
    /// Minimum query-biased degree over `community` (minimum TPPR for the
    /// baseline model).
    pub beta: f64,
    pub algorithm: Algorithm,
    pub timings: Timings,
}

impl CommunityResult {
    pub fn contains(&self, v: VertexId) -> bool {
        self.community.binary_search(&v).is_ok()
    }

    pub fn len(&self) -> usize {
        self.community.len()
    }

    pub fn is_empty(&self) -> bool {
        self.community.is_empty()
    }
}

pub(crate) fn mask_of(n: usize, set: &[VertexId]) -> Vec<bool> {
    let mut mask = vec![false; n];
    for v in set {
        mask[v.index()] = true;
    }
    mask
}

/// Query-biased degrees of the members of a vertex set.
#[derive(Clone, Debug)]
pub struct DegreeMap {
    members: Vec<VertexId>,
    values: Vec<f64>,
}

impl DegreeMap {
    pub fn new(g: &TemporalGraph, tppr: &TpprVector, space: &[VertexId]) -> Self {
        let mask = mask_of(g.num_vertices(), space);
        Self::from_mask(g, tppr.scores(), &mask, space)
    }

    fn from_mask(g: &TemporalGraph, scores: &[f64], mask: &[bool], space: &[VertexId]) -> Self {
        let values = space
            .iter()
            .map(|&u| degree_in(g, scores, mask, u))
            .collect();
        DegreeMap {
            members: space.to_vec(),
            values,
        }
    }

    pub fn get(&self, u: VertexId) -> Option<f64> {
        self.members
            .iter()
            .position(|&m| m == u)
            .map(|i| self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, f64)> + '_ {
        self.members
            .iter()
            .copied()
            .zip(self.values.iter().copied())
    }

    /// Minimum degree; zero for an empty set.
    pub fn min(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

#[inline]
pub(crate) fn degree_in(g: &TemporalGraph, scores: &[f64], mask: &[bool], u: VertexId) -> f64 {
    g.neighbors(u)
        .iter()
        .filter(|w| mask[w.index()])
        .map(|w| scores[w.index()])
        .sum()
}

/// `ρ_space(u)`: TPPR summed over the neighbours of `u` inside `space`.
pub fn query_biased_degree(
    tppr: &TpprVector,
    g: &TemporalGraph,
    space: &[VertexId],
    u: VertexId,
) -> f64 {
    let mask = mask_of(g.num_vertices(), space);
    degree_in(g, tppr.scores(), &mask, u)
}

/// Minimum query-biased degree over `set`, zero for an empty set.
pub(crate) fn min_degree(g: &TemporalGraph, scores: &[f64], set: &[VertexId]) -> f64 {
    let mask = mask_of(g.num_vertices(), set);
    set.iter()
        .map(|&u| degree_in(g, scores, &mask, u))
        .fold(None, |acc: Option<f64>, x| {
            Some(acc.map_or(x, |a| a.min(x)))
        })
        .unwrap_or(0.0)
}

/// Exact search for one query vertex.
pub fn egr(g: &TemporalGraph, ctx: &QueryContext) -> Result<CommunityResult> {
    if !ctx.is_single() {
        return Err(Error::InvalidParameter(
            "egr takes a single query vertex; use egr_multi".into(),
        ));
    }
    egr_multi(g, ctx)
}

/// Exact search for a query set, with TPPR averaged over the queries.
pub fn egr_multi(g: &TemporalGraph, ctx: &QueryContext) -> Result<CommunityResult> {
    egr_with(&TransitionModel::new(g), ctx)
}

pub fn egr_with<D: Decay>(
    model: &TransitionModel<'_, D>,
    ctx: &QueryContext,
) -> Result<CommunityResult> {
    let g = model.graph();
    ctx.validate(g)?;
    if !g.seeds_connected(&vec![true; g.num_vertices()], ctx.queries()) {
        return Err(Error::QueriesDisconnected);
    }
    let started = Instant::now();
    let tppr = compute_tppr_multi_with(model, ctx)?;
    let tppr_time = started.elapsed();

    let started = Instant::now();
    let (community, beta) = greedy_removing(g, &tppr, ctx.queries())?;
    Ok(CommunityResult {
        community,
        beta,
        algorithm: Algorithm::Egr,
        timings: Timings {
            tppr: tppr_time,
            search: started.elapsed(),
        },
    })
}

/// Greedy removal on precomputed scores. Returns the community (sorted) and
/// its minimum query-biased degree, recomputed on the final set.
pub fn greedy_removing(
    g: &TemporalGraph,
    tppr: &TpprVector,
    queries: &[VertexId],
) -> Result<(Vec<VertexId>, f64)> {
    let n = g.num_vertices();
    let scores = tppr.scores();
    let is_query = mask_of(n, queries);
    let multi = queries.len() > 1;
    let mut alive = vec![true; n];
    if !g.seeds_connected(&alive, queries) {
        return Err(Error::QueriesDisconnected);
    }

    let rho: Vec<f64> = g
        .vertices()
        .map(|u| g.neighbors(u).iter().map(|w| scores[w.index()]).sum())
        .collect();
    let mut heap = DegreeHeap::new(rho, &is_query);

    let mut removed: Vec<VertexId> = Vec::with_capacity(n);
    let mut best = 0.0f64;
    let mut best_round = 0usize;

    while let Some((u, value)) = heap.pop() {
        // `value` is the minimum over the current space, which therefore is
        // a core of that value. Record it before a query vertex ends the loop.
        if value > best + SCORE_TOLERANCE {
            if multi && !g.seeds_connected(&alive, queries) {
                break;
            }
            best = value;
            best_round = removed.len();
        }
        if is_query[u.index()] {
            break;
        }
        alive[u.index()] = false;
        removed.push(u);
        let mass = scores[u.index()];
        if mass == 0.0 {
            continue;
        }
        for &w in g.neighbors(u) {
            if alive[w.index()] {
                heap.decrease(w, mass);
            }
        }
    }

    let mut snapshot = vec![true; n];
    for u in &removed[..best_round] {
        snapshot[u.index()] = false;
    }
    let community = g.component_within(&snapshot, queries);
    let beta = min_degree(g, scores, &community);
    Ok((community, beta))
}

/// Indexed 4-ary min-heap over vertices keyed by degree, with decrease-key.
/// Ties go to the smallest id, with query vertices behind every non-query
/// vertex of equal degree.
struct DegreeHeap {
    /// (degree, tag) where tag = query bit above the id.
    slots: Vec<(f64, u32)>,
    position: Vec<u32>,
}

impl DegreeHeap {
    const QUERY_BIT: u32 = 1 << 31;
    const GONE: u32 = u32::MAX;
    const ARITY: usize = 4;

    fn new(degrees: Vec<f64>, is_query: &[bool]) -> Self {
        let slots: Vec<(f64, u32)> = degrees
            .into_iter()
            .enumerate()
            .map(|(i, d)| (d, i as u32 | if is_query[i] { Self::QUERY_BIT } else { 0 }))
            .collect();
        let mut heap = DegreeHeap {
            position: (0..slots.len() as u32).collect(),
            slots,
        };
        for i in (0..heap.slots.len().div_ceil(Self::ARITY)).rev() {
            heap.sift_down(i);
        }
        heap
    }

    #[inline]
    fn less(a: (f64, u32), b: (f64, u32)) -> bool {
        match a.0.total_cmp(&b.0) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => a.1 < b.1,
        }
    }

    #[inline]
    fn place(&mut self, i: usize, entry: (f64, u32)) {
        self.slots[i] = entry;
        self.position[(entry.1 & !Self::QUERY_BIT) as usize] = i as u32;
    }

    fn sift_up(&mut self, mut i: usize) {
        let entry = self.slots[i];
        while i > 0 {
            let parent = (i - 1) / Self::ARITY;
            if !Self::less(entry, self.slots[parent]) {
                break;
            }
            let p = self.slots[parent];
            self.place(i, p);
            i = parent;
        }
        self.place(i, entry);
    }

    fn sift_down(&mut self, mut i: usize) {
        let entry = self.slots[i];
        let len = self.slots.len();
        loop {
            let first = Self::ARITY * i + 1;
            if first >= len {
                break;
            }
            let mut child = first;
            for c in first + 1..(first + Self::ARITY).min(len) {
                if Self::less(self.slots[c], self.slots[child]) {
                    child = c;
                }
            }
            if !Self::less(self.slots[child], entry) {
                break;
            }
            let c = self.slots[child];
            self.place(i, c);
            i = child;
        }
        self.place(i, entry);
    }

    fn pop(&mut self) -> Option<(VertexId, f64)> {
        let top = *self.slots.first()?;
        let last = self.slots.pop().expect("non-empty");
        let id = top.1 & !Self::QUERY_BIT;
        self.position[id as usize] = Self::GONE;
        if !self.slots.is_empty() {
            self.place(0, last);
            self.sift_down(0);
        }
        Some((VertexId(id), top.0))
    }

    fn decrease(&mut self, v: VertexId, by: f64) {
        let i = self.position[v.index()];
        debug_assert_ne!(i, Self::GONE);
        let i = i as usize;
        self.slots[i].0 -= by;
        self.sift_up(i);
    }
}

/// Exhaustive search over connected supersets of the query set. Returns the
/// optimum and the union of all optimal sets, which is the unique maximal
/// optimum.
pub fn brute_force_qtcs(g: &TemporalGraph, ctx: &QueryContext) -> Result<CommunityResult> {
    let n = g.num_vertices();
    if n > BRUTE_FORCE_MAX_VERTICES {
        return Err(Error::TooLarge {
            n,
            max: BRUTE_FORCE_MAX_VERTICES,
        });
    }
    ctx.validate(g)?;
    let started = Instant::now();
    let tppr = compute_tppr_multi_with(&TransitionModel::new(g), ctx)?;
    let tppr_time = started.elapsed();
    let started = Instant::now();
    let (community, beta) = brute_force_with_scores(g, &tppr, ctx.queries())?;
    Ok(CommunityResult {
        community,
        beta,
        algorithm: Algorithm::BruteForce,
        timings: Timings {
            tppr: tppr_time,
            search: started.elapsed(),
        },
    })
}

pub fn brute_force_with_scores(
    g: &TemporalGraph,
    tppr: &TpprVector,
    queries: &[VertexId],
) -> Result<(Vec<VertexId>, f64)> {
    let n = g.num_vertices();
    if n > BRUTE_FORCE_MAX_VERTICES {
        return Err(Error::TooLarge {
            n,
            max: BRUTE_FORCE_MAX_VERTICES,
        });
    }
    let scores = tppr.scores();
    let adjacency: Vec<u32> = g
        .vertices()
        .map(|u| g.neighbors(u).iter().fold(0u32, |acc, w| acc | 1 << w.0))
        .collect();
    let required = queries.iter().fold(0u32, |acc, q| acc | 1 << q.0);
    let free: Vec<u32> = (0..n as u32).filter(|i| required & (1 << i) == 0).collect();

    let connected = |set: u32| -> bool {
        let start = set.trailing_zeros() as usize;
        let mut seen = 1u32 << start;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            let mut next = adjacency[u] & set & !seen;
            seen |= next;
            while next != 0 {
                let w = next.trailing_zeros() as usize;
                next &= next - 1;
                queue.push_back(w);
            }
        }
        seen == set
    };
    let min_degree_of = |set: u32| -> f64 {
        (0..n)
            .filter(|&u| set & (1 << u) != 0)
            .map(|u| {
                let mut neigh = adjacency[u] & set;
                let mut total = 0.0;
                while neigh != 0 {
                    let w = neigh.trailing_zeros() as usize;
                    neigh &= neigh - 1;
                    total += scores[w];
                }
                total
            })
            .fold(f64::INFINITY, f64::min)
    };

    let candidates: Vec<Option<(u32, f64)>> = par::map_range(1usize << free.len(), |bits| {
        let mut set = required;
        for (i, &v) in free.iter().enumerate() {
            if bits & (1 << i) != 0 {
                set |= 1 << v;
            }
        }
        connected(set).then(|| (set, min_degree_of(set)))
    });
    let feasible: Vec<(u32, f64)> = candidates.into_iter().flatten().collect();
    if feasible.is_empty() {
        return Err(Error::QueriesDisconnected);
    }
    let best = feasible
        .iter()
        .map(|&(_, v)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    let union = feasible
        .iter()
        .filter(|&&(_, v)| v >= best - SCORE_TOLERANCE)
        .fold(0u32, |acc, &(set, _)| acc | set);
    let community: Vec<VertexId> = (0..n as u32)
        .filter(|i| union & (1 << i) != 0)
        .map(VertexId)
        .collect();
    let beta = min_degree(g, scores, &community);
    Ok((community, beta))
}

/// Baseline model: a connected k-core containing the queries whose minimum
/// TPPR is as large as possible. Searched heuristically by peeling the
/// lowest-TPPR vertex and restoring the k-core after each removal;
/// `beta` reports the minimum TPPR of the best set seen.
pub fn qtcs_baseline(g: &TemporalGraph, ctx: &QueryContext, k: usize) -> Result<CommunityResult> {
    ctx.validate(g)?;
    let started = Instant::now();
    let tppr = compute_tppr_multi_with(&TransitionModel::new(g), ctx)?;
    let tppr_time = started.elapsed();
    let started = Instant::now();
    let (community, beta) = baseline_with_scores(g, &tppr, ctx.queries(), k)?;
    Ok(CommunityResult {
        community,
        beta,
        algorithm: Algorithm::Baseline,
        timings: Timings {
            tppr: tppr_time,
            search: started.elapsed(),
        },
    })
}

pub fn baseline_with_scores(
    g: &TemporalGraph,
    tppr: &TpprVector,
    queries: &[VertexId],
    k: usize,
) -> Result<(Vec<VertexId>, f64)> {
    let n = g.num_vertices();
    let scores = tppr.scores();
    let mut alive = vec![true; n];
    let mut degree: Vec<usize> = g.vertices().map(|u| g.neighbors(u).len()).collect();

    let peel = |start: Vec<VertexId>, alive: &mut Vec<bool>, degree: &mut Vec<usize>| {
        let mut stack = start;
        while let Some(u) = stack.pop() {
            if !alive[u.index()] {
                continue;
            }
            alive[u.index()] = false;
            for &w in g.neighbors(u) {
                if alive[w.index()] {
                    degree[w.index()] -= 1;
                    if degree[w.index()] < k {
                        stack.push(w);
                    }
                }
            }
        }
    };
    let restrict = |alive: &mut Vec<bool>| -> Option<Vec<VertexId>> {
        let comp = g.component_within(alive, &queries[..1]);
        if queries.iter().any(|q| comp.binary_search(q).is_err()) {
            return None;
        }
        alive.iter_mut().for_each(|a| *a = false);
        for v in &comp {
            alive[v.index()] = true;
        }
        Some(comp)
    };

    let low: Vec<VertexId> = g.vertices().filter(|u| degree[u.index()] < k).collect();
    peel(low, &mut alive, &mut degree);
    let mut current = restrict(&mut alive).ok_or(Error::NoCore { k })?;

    let mut order: Vec<VertexId> = current.clone();
    order.sort_by(|a, b| {
        scores[a.index()]
            .total_cmp(&scores[b.index()])
            .then(a.cmp(b))
    });
    let cap = queries
        .iter()
        .map(|q| scores[q.index()])
        .fold(f64::INFINITY, f64::min);

    let mut cursor = 0usize;
    let next_alive = |cursor: &mut usize, alive: &[bool]| -> Option<VertexId> {
        while *cursor < order.len() && !alive[order[*cursor].index()] {
            *cursor += 1;
        }
        order.get(*cursor).copied()
    };
    let mut best = next_alive(&mut cursor, &alive).map_or(0.0, |v| scores[v.index()]);
    let mut best_set = current.clone();

    while let Some(x) = next_alive(&mut cursor, &alive) {
        // the objective can never exceed the smallest query score
        if scores[x.index()] >= cap {
            break;
        }
        peel(vec![x], &mut alive, &mut degree);
        if queries.iter().any(|q| !alive[q.index()]) {
            break;
        }
        current = match restrict(&mut alive) {
            Some(c) => c,
            None => break,
        };
        let value = next_alive(&mut cursor, &alive).map_or(0.0, |v| scores[v.index()]);
        if value > best + SCORE_TOLERANCE {
            best = value;
            best_set = current.clone();
        }
    }
    Ok((best_set, best))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tppr::compute_tppr;

    fn tri() -> TemporalGraph {
        TemporalGraph::from_edges([("q", "a", 1), ("q", "b", 1), ("a", "b", 2)]).unwrap()
    }

    fn chain3() -> TemporalGraph {
        TemporalGraph::from_edges([("q", "a", 1), ("a", "b", 2)]).unwrap()
    }

    fn edge1() -> TemporalGraph {
        TemporalGraph::from_edges([("q", "a", 1)]).unwrap()
    }

    fn ctx(g: &TemporalGraph, labels: &[&str]) -> QueryContext {
        QueryContext::new(labels.iter().map(|l| g.vertex(l).unwrap()), 0.2).unwrap()
    }

    fn labels(g: &TemporalGraph, set: &[VertexId]) -> Vec<String> {
        let mut out: Vec<String> = set.iter().map(|&v| g.label(v).to_owned()).collect();
        out.sort();
        out
    }

    #[test]
    fn degree_examples() {
        let g = tri();
        let v = |l| g.vertex(l).unwrap();
        let t = compute_tppr(&g, v("q"), 0.2).unwrap();
        let all: Vec<_> = g.vertices().collect();
        assert!((query_biased_degree(&t, &g, &all, v("q")) - 1.0).abs() < 1e-12);
        assert_eq!(query_biased_degree(&t, &g, &[v("a")], v("a")), 0.0);
        assert_eq!(query_biased_degree(&t, &g, &[v("q"), v("a")], v("a")), 0.0);
        let map = DegreeMap::new(&g, &t, &all);
        assert!((map.min() - 0.5).abs() < 1e-12);
        assert_eq!(
            map.get(v("q")),
            Some(query_biased_degree(&t, &g, &all, v("q")))
        );
    }

    #[test]
    fn egr_fixtures() {
        for (g, want, beta) in [
            (tri(), vec!["a", "b", "q"], 0.5),
            (chain3(), vec!["a", "b", "q"], 0.2),
            (edge1(), vec!["a", "q"], 0.0),
        ] {
            let r = egr(&g, &ctx(&g, &["q"])).unwrap();
            assert_eq!(labels(&g, &r.community), want);
            assert!((r.beta - beta).abs() < 1e-12, "{} vs {beta}", r.beta);
            let b = brute_force_qtcs(&g, &ctx(&g, &["q"])).unwrap();
            assert_eq!(b.community, r.community);
            assert!((b.beta - beta).abs() < 1e-12);
        }
    }

    #[test]
    fn egr_rejects_query_sets() {
        let g = tri();
        assert!(matches!(
            egr(&g, &ctx(&g, &["q", "a"])),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn egr_multi_examples() {
        let g = tri();
        let single = egr_multi(&g, &ctx(&g, &["q"])).unwrap();
        let direct = egr(&g, &ctx(&g, &["q"])).unwrap();
        assert_eq!(single.community, direct.community);
        assert_eq!(single.beta.to_bits(), direct.beta.to_bits());

        let pair = egr_multi(&g, &ctx(&g, &["q", "a"])).unwrap();
        assert_eq!(labels(&g, &pair.community), vec!["a", "b", "q"]);
        assert!((pair.beta - 0.5).abs() < 1e-12);

        let split = TemporalGraph::from_edges([("q", "a", 1), ("x", "y", 2)]).unwrap();
        assert!(matches!(
            egr_multi(&split, &ctx(&split, &["q", "x"])),
            Err(Error::QueriesDisconnected)
        ));
    }

    #[test]
    fn query_vertex_as_strict_minimum_still_records_its_snapshot() {
        // q's only neighbour is a; q's degree tppr(a) is the global minimum
        // from the start, so the very first extraction is q itself.
        let g = TemporalGraph::from_edges([
            ("q", "a", 1),
            ("a", "b", 2),
            ("a", "c", 2),
            ("b", "c", 3),
            ("b", "a", 4),
            ("c", "a", 4),
        ])
        .unwrap();
        let c = ctx(&g, &["q"]);
        let r = egr(&g, &c).unwrap();
        let b = brute_force_qtcs(&g, &c).unwrap();
        assert_eq!(r.community, b.community);
        assert!((r.beta - b.beta).abs() < 1e-12);
        assert!(r.beta > 0.0);
    }

    #[test]
    fn baseline_examples() {
        let g = tri();
        let r = qtcs_baseline(&g, &ctx(&g, &["q"]), 2).unwrap();
        assert_eq!(labels(&g, &r.community), vec!["a", "b", "q"]);
        assert_eq!(r.beta, 0.0);
        assert!(matches!(
            qtcs_baseline(&g, &ctx(&g, &["q"]), 3),
            Err(Error::NoCore { k: 3 })
        ));
        for g in [tri(), chain3()] {
            let r = qtcs_baseline(&g, &ctx(&g, &["q"]), 0).unwrap();
            assert_eq!(r.community.len(), g.num_vertices());
        }
    }

    #[test]
    fn brute_force_limits() {
        let g = crate::synthetic::random_temporal_graph(13, 40, 5, 1);
        assert!(matches!(
            brute_force_qtcs(&g, &QueryContext::single(VertexId(0), 0.2).unwrap()),
            Err(Error::TooLarge { n: 13, max: 12 })
        ));
    }
}
