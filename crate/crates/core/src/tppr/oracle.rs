//! Power iteration over the explicit ordered-edge state space.
//!
//! Builds the transition rows straight from the edge list in `O(m^2)`, with
//! no use of the graph's slot index or the memoised model, and iterates
//! `x <- α χ + (1 - α) x P` to a fixed point. Test scale only.

use crate::error::{Error, Result};
use crate::graph::{TemporalGraph, Timestamp, VertexId};
use crate::tppr::{QueryContext, TpprVector};

pub const DEFAULT_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_MAX_ITERS: usize = 10_000;

#[derive(Copy, Clone)]
struct State {
    head: VertexId,
    tail: VertexId,
    time: Timestamp,
}

/// Sparse row-stochastic matrix over ordered states.
pub struct ExplicitChain {
    states: Vec<State>,
    rows: Vec<Vec<(usize, f64)>>,
}

impl ExplicitChain {
    pub fn build(g: &TemporalGraph) -> Self {
        Self::build_with(g, |gap| 1.0 / gap as f64)
    }

    pub fn build_with(g: &TemporalGraph, decay: impl Fn(Timestamp) -> f64) -> Self {
        let mut states = Vec::with_capacity(2 * g.num_edges());
        for e in g.edges() {
            states.push(State {
                head: e.u,
                tail: e.v,
                time: e.t,
            });
            states.push(State {
                head: e.v,
                tail: e.u,
                time: e.t,
            });
        }
        let rows = (0..states.len())
            .map(|i| {
                let from = states[i];
                let next: Vec<(usize, f64)> = states
                    .iter()
                    .enumerate()
                    .filter(|(_, s)| s.head == from.tail && s.time > from.time)
                    .map(|(j, s)| (j, decay(s.time - from.time)))
                    .collect();
                if next.is_empty() {
                    return vec![(i, 1.0)];
                }
                let total: f64 = next.iter().map(|&(_, w)| w).sum();
                next.into_iter().map(|(j, w)| (j, w / total)).collect()
            })
            .collect();
        ExplicitChain { states, rows }
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.rows[i].iter().map(|&(_, p)| p).sum()
    }

    /// Stationary stop distribution over states for walks started uniformly
    /// on the outgoing states of `q`.
    pub fn solve(&self, q: VertexId, alpha: f64, tol: f64, max_iters: usize) -> Result<Vec<f64>> {
        let start: Vec<usize> = (0..self.states.len())
            .filter(|&i| self.states[i].head == q)
            .collect();
        if start.is_empty() {
            return Err(Error::NoQueryActivity(q));
        }
        let mut teleport = vec![0.0; self.states.len()];
        for &i in &start {
            teleport[i] = 1.0 / start.len() as f64;
        }
        let mut x = teleport.clone();
        let mut change = f64::INFINITY;
        for _ in 0..max_iters {
            let mut next: Vec<f64> = teleport.iter().map(|c| alpha * c).collect();
            for (i, row) in self.rows.iter().enumerate() {
                let flow = (1.0 - alpha) * x[i];
                if flow == 0.0 {
                    continue;
                }
                for &(j, p) in row {
                    next[j] += flow * p;
                }
            }
            change = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
            x = next;
            if change < tol {
                return Ok(x);
            }
        }
        Err(Error::NotConverged {
            iterations: max_iters,
            change,
        })
    }

    /// Sums state scores into their tail vertices.
    pub fn aggregate(&self, n: usize, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for (s, v) in self.states.iter().zip(x) {
            out[s.tail.index()] += v;
        }
        out
    }
}

/// Oracle TPPR; multi-query contexts average the per-query solutions.
pub fn tppr_power_iteration(
    g: &TemporalGraph,
    ctx: &QueryContext,
    tol: f64,
    max_iters: usize,
) -> Result<TpprVector> {
    let chain = ExplicitChain::build(g);
    let n = g.num_vertices();
    let mut scores = vec![0.0; n];
    for &q in ctx.queries() {
        let x = chain.solve(q, ctx.alpha(), tol, max_iters)?;
        for (acc, v) in scores.iter_mut().zip(chain.aggregate(n, &x)) {
            *acc += v;
        }
    }
    let k = ctx.queries().len() as f64;
    scores.iter_mut().for_each(|x| *x /= k);
    Ok(TpprVector::new(scores, ctx.queries().to_vec(), ctx.alpha()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(g: &TemporalGraph, q: &str) -> QueryContext {
        QueryContext::single(g.vertex(q).unwrap(), 0.2).unwrap()
    }

    #[test]
    fn chain_fixture() {
        let g = TemporalGraph::from_edges([("q", "a", 1), ("a", "b", 2)]).unwrap();
        let t =
            tppr_power_iteration(&g, &ctx(&g, "q"), DEFAULT_TOLERANCE, DEFAULT_MAX_ITERS).unwrap();
        let v = |l| g.vertex(l).unwrap();
        assert!(t.get(v("q")).abs() < 1e-10);
        assert!((t.get(v("a")) - 0.2).abs() < 1e-10);
        assert!((t.get(v("b")) - 0.8).abs() < 1e-10);
        assert!((t.total() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn triangle_fixture() {
        let g = TemporalGraph::from_edges([("q", "a", 1), ("q", "b", 1), ("a", "b", 2)]).unwrap();
        let t =
            tppr_power_iteration(&g, &ctx(&g, "q"), DEFAULT_TOLERANCE, DEFAULT_MAX_ITERS).unwrap();
        let v = |l| g.vertex(l).unwrap();
        assert!((t.get(v("a")) - 0.5).abs() < 1e-10);
        assert!((t.get(v("b")) - 0.5).abs() < 1e-10);
    }

    #[test]
    fn reports_non_convergence() {
        let g = crate::synthetic::random_temporal_graph(15, 80, 10, 3);
        assert!(matches!(
            tppr_power_iteration(&g, &ctx(&g, "0"), 1e-12, 3),
            Err(Error::NotConverged { iterations: 3, .. })
        ));
    }

    #[test]
    fn explicit_rows_are_stochastic() {
        let g = crate::synthetic::random_temporal_graph(15, 80, 10, 3);
        let chain = ExplicitChain::build(&g);
        for i in 0..chain.num_states() {
            assert!((chain.row_sum(i) - 1.0).abs() < 1e-12);
        }
    }
}
