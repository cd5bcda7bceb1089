//! Local expansion around the queries, driven by push bounds.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use super::push::PushState;
use crate::graph::{TemporalGraph, VertexId};
use crate::numeric::Score;
use crate::transition::{Decay, TransitionModel};

/// Added to upper bounds before they are compared with `β̂`, so rounding in
/// the incremental sums can only keep extra vertices.
pub(crate) const PRUNE_SLACK: f64 = 1e-12;

/// Output of the expansion stage.
#[derive(Clone, Debug)]
pub struct Expansion {
    /// Candidate set, sorted by id.
    pub candidates: Vec<VertexId>,
    pub push: PushState,
    /// Final best lower estimate `β̂`.
    pub beta_hat: f64,
    /// Vertices seen (admitted or pruned).
    pub visited: usize,
}

/// What an observer sees after each expansion step.
pub struct ExpandStep<'a> {
    pub push: &'a PushState,
    /// Expanded set so far, in pop order.
    pub expanded: &'a [VertexId],
    /// Vertices seen so far, admitted or pruned.
    pub visited: &'a [VertexId],
    pub beta_hat: f64,
}

/// Tracks whether the expanded set is connected so that `β̂` only ever
/// comes from sets that are feasible for the whole query set.
struct Components {
    parent: Vec<u32>,
    count: usize,
}

impl Components {
    fn new(n: usize) -> Self {
        Components {
            parent: (0..n as u32).collect(),
            count: 0,
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let up = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = up;
            x = up;
        }
        x
    }

    fn union(&mut self, a: VertexId, b: VertexId) {
        let (ra, rb) = (self.find(a.0), self.find(b.0));
        if ra != rb {
            self.parent[ra as usize] = rb;
            self.count -= 1;
        }
    }
}

pub fn expand<D: Decay>(
    model: &TransitionModel<'_, D>,
    queries: &[VertexId],
    alpha: f64,
) -> Expansion {
    expand_observed(model, queries, alpha, |_| {})
}

/// Expansion with a callback invoked after every popped vertex.
pub fn expand_observed<D: Decay>(
    model: &TransitionModel<'_, D>,
    queries: &[VertexId],
    alpha: f64,
    mut observe: impl FnMut(&ExpandStep<'_>),
) -> Expansion {
    let g: &TemporalGraph = model.graph();
    let n = g.num_vertices();
    let mut push = PushState::seeded(g, queries, alpha);

    let mut in_c = vec![false; n];
    let mut in_q = vec![false; n];
    let mut in_d = vec![false; n];
    let mut expanded: Vec<VertexId> = Vec::new();
    let mut visited: Vec<VertexId> = Vec::new();
    let mut queue: VecDeque<VertexId> = VecDeque::new();
    for &q in queries {
        in_q[q.index()] = true;
        in_d[q.index()] = true;
        queue.push_back(q);
        visited.push(q);
    }
    let mut queue_mass = 0.0f64;

    // ρ̂_C over C, with a lazy min-heap keyed by a per-vertex version.
    let mut rho = vec![0.0f64; n];
    let mut version = vec![0u32; n];
    let mut heap: BinaryHeap<Reverse<(Score, VertexId, u32)>> = BinaryHeap::new();
    let mut components = Components::new(n);
    let mut beta_hat = 0.0f64;

    let bump = |w: VertexId,
                delta: f64,
                rho: &mut Vec<f64>,
                version: &mut Vec<u32>,
                heap: &mut BinaryHeap<Reverse<(Score, VertexId, u32)>>| {
        rho[w.index()] += delta;
        version[w.index()] += 1;
        heap.push(Reverse((Score(rho[w.index()]), w, version[w.index()])));
    };

    loop {
        if queue.is_empty() {
            break;
        }
        let exact_queue_mass = || -> f64 { queue.iter().map(|&w| push.lower(w)).sum() };
        if push.residue_total() + queue_mass + PRUNE_SLACK < beta_hat
            && push.residue_total() + exact_queue_mass() + PRUNE_SLACK < beta_hat
        {
            for &w in &queue {
                in_c[w.index()] = true;
                expanded.push(w);
            }
            queue.clear();
            break;
        }

        let u = queue.pop_front().expect("queue is non-empty");
        in_q[u.index()] = false;
        queue_mass -= push.lower(u);
        in_c[u.index()] = true;
        expanded.push(u);
        components.count += 1;
        let mut own = 0.0;
        for &w in g.neighbors(u) {
            if in_c[w.index()] {
                own += push.lower(w);
                components.union(u, w);
                let delta = push.lower(u);
                if delta != 0.0 {
                    bump(w, delta, &mut rho, &mut version, &mut heap);
                }
            }
        }
        bump(u, own - rho[u.index()], &mut rho, &mut version, &mut heap);

        for &s in g.out_states(u) {
            if let Some((v, delta)) = push.propagate(model, s) {
                if in_q[v.index()] {
                    queue_mass += delta;
                }
                if in_c[v.index()] {
                    for &w in g.neighbors(v) {
                        if in_c[w.index()] {
                            bump(w, delta, &mut rho, &mut version, &mut heap);
                        }
                    }
                }
            }
        }

        // A disconnected C is not a feasible community, so its minimum
        // says nothing about the optimum.
        if components.count == 1 && queries.iter().all(|q| in_c[q.index()]) {
            while let Some(&Reverse((_, w, ver))) = heap.peek() {
                if version[w.index()] == ver {
                    break;
                }
                heap.pop();
            }
            if let Some(&Reverse((Score(min), _, _))) = heap.peek() {
                if min > beta_hat {
                    beta_hat = min;
                }
            }
        }

        for &v in g.neighbors(u) {
            if in_d[v.index()] {
                continue;
            }
            in_d[v.index()] = true;
            visited.push(v);
            let reach: f64 = g.neighbors(v).iter().map(|&w| push.lower(w)).sum();
            if push.residue_total() + reach + PRUNE_SLACK >= beta_hat {
                in_q[v.index()] = true;
                queue_mass += push.lower(v);
                queue.push_back(v);
            }
        }

        observe(&ExpandStep {
            push: &push,
            expanded: &expanded,
            visited: &visited,
            beta_hat,
        });
    }

    let visited = visited.len();
    expanded.sort_unstable();
    Expansion {
        candidates: expanded,
        push,
        beta_hat,
        visited,
    }
}
