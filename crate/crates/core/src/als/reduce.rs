//! Reduction of the candidate set with a certified approximation ratio.

use std::collections::VecDeque;

use super::push::PushState;
use crate::community::mask_of;
use crate::graph::{TemporalGraph, VertexId};

/// Upper bound on reduction rounds; the ratio halves each round, so this is
/// never reached unless the bounds are degenerate.
const MAX_ROUNDS: usize = 4096;

#[derive(Clone, Debug, PartialEq)]
pub struct Reduction {
    pub community: Vec<VertexId>,
    /// Certified ratio; infinite when the push produced no usable lower bound.
    pub epsilon: f64,
    pub fallback: bool,
    /// Minimum lower-bound degree over the community.
    pub beta_lower: f64,
    /// Upper bound on the optimum derived from the candidate set.
    pub beta_upper: f64,
    pub rounds: usize,
}

fn should_peel(eps_bar: f64, value: f64, temp: f64) -> bool {
    value <= 0.0 || eps_bar * value <= temp
}

pub fn reduce(
    g: &TemporalGraph,
    candidates: &[VertexId],
    push: &PushState,
    queries: &[VertexId],
) -> Reduction {
    let n = g.num_vertices();
    let lower = push.lower_bounds();
    let mut in_r = mask_of(n, candidates);
    debug_assert!(queries.iter().all(|q| in_r[q.index()]));
    let is_query = mask_of(n, queries);

    let mut rho = vec![0.0f64; n];
    for &u in candidates {
        rho[u.index()] = g
            .neighbors(u)
            .iter()
            .filter(|w| in_r[w.index()])
            .map(|w| lower[w.index()])
            .sum();
    }
    let fold = |f: fn(f64, f64) -> f64, init: f64, rho: &[f64], set: &[VertexId]| {
        set.iter().map(|u| rho[u.index()]).fold(init, f)
    };
    let temp = fold(f64::max, 0.0, &rho, candidates) + push.residue_total();
    let ratio = |min: f64| if min > 0.0 { temp / min } else { f64::INFINITY };
    let finish = |in_r: &[bool], epsilon: f64, fallback: bool, rounds: usize| {
        let community = g.component_within(in_r, queries);
        let mask = mask_of(n, &community);
        let beta_lower = community
            .iter()
            .map(|&u| {
                g.neighbors(u)
                    .iter()
                    .filter(|w| mask[w.index()])
                    .map(|w| lower[w.index()])
                    .sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min);
        Reduction {
            community,
            epsilon,
            fallback,
            beta_lower: if beta_lower.is_finite() {
                beta_lower
            } else {
                0.0
            },
            beta_upper: temp,
            rounds,
        }
    };

    // Only the queries themselves are left: that set is the optimum.
    if candidates.len() == queries.len() || temp <= 0.0 {
        return finish(&in_r, 1.0, false, 0);
    }

    let mut eps_bar = ratio(fold(f64::min, f64::INFINITY, &rho, candidates));
    let mut epsilon: Option<f64> = None;
    let mut members: Vec<VertexId> = candidates.to_vec();
    let mut rounds = 0;

    while rounds < MAX_ROUNDS {
        rounds += 1;
        let mut next = rho.clone();
        let mut removed = vec![false; n];
        let mut queue: VecDeque<VertexId> = VecDeque::new();
        let mut query_fell = false;
        for &u in &members {
            if should_peel(eps_bar, next[u.index()], temp) {
                removed[u.index()] = true;
                query_fell |= is_query[u.index()];
                queue.push_back(u);
            }
        }
        while !query_fell {
            let Some(u) = queue.pop_front() else { break };
            let mass = lower[u.index()];
            for &v in g.neighbors(u) {
                if !in_r[v.index()] || removed[v.index()] {
                    continue;
                }
                next[v.index()] -= mass;
                if should_peel(eps_bar, next[v.index()], temp) {
                    removed[v.index()] = true;
                    query_fell |= is_query[v.index()];
                    queue.push_back(v);
                }
            }
        }
        if !query_fell && queries.len() > 1 {
            let survivors: Vec<bool> = (0..n).map(|i| in_r[i] && !removed[i]).collect();
            query_fell = !g.seeds_connected(&survivors, queries);
        }
        if query_fell {
            break;
        }

        for u in &members {
            if removed[u.index()] {
                in_r[u.index()] = false;
            }
        }
        members.retain(|u| in_r[u.index()]);
        rho = next;
        if eps_bar.is_infinite() {
            // survivors all have positive bounds now
            eps_bar = ratio(fold(f64::min, f64::INFINITY, &rho, &members));
            epsilon = Some(eps_bar);
            continue;
        }
        epsilon = Some(eps_bar);
        if eps_bar <= 1.0 {
            break;
        }
        eps_bar = (eps_bar / 2.0).max(1.0);
    }

    match epsilon {
        Some(eps) => finish(&in_r, eps, false, rounds),
        None => {
            let all = mask_of(n, candidates);
            let initial = ratio(fold(f64::min, f64::INFINITY, &rho, candidates));
            finish(&all, initial, true, rounds)
        }
    }
}
