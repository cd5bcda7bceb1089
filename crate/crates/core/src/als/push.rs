//! Forward push over ordered edge states.

use std::collections::HashMap;

use crate::graph::{StateId, TemporalGraph, VertexId};
use crate::numeric::CompensatedSum;
use crate::transition::{Decay, TransitionModel};

/// Reserves and residues of a forward push, plus the per-vertex lower bound
/// `t̂ppr(v)`: the reserve collected on states entering `v`.
#[derive(Clone, Debug)]
pub struct PushState {
    reserve: HashMap<StateId, f64>,
    residue: HashMap<StateId, f64>,
    lower: Vec<f64>,
    residue_total: CompensatedSum,
    threshold: f64,
    alpha: f64,
    pushes: usize,
}

impl PushState {
    /// Spreads unit residue uniformly over the outgoing states of `sources`.
    pub fn seeded(g: &TemporalGraph, sources: &[VertexId], alpha: f64) -> Self {
        let total: usize = sources.iter().map(|&q| g.temporal_degree(q)).sum();
        let mut residue = HashMap::with_capacity(total);
        if total > 0 {
            let share = 1.0 / total as f64;
            for &q in sources {
                for &s in g.out_states(q) {
                    residue.insert(s, share);
                }
            }
        }
        PushState {
            reserve: HashMap::new(),
            residue,
            lower: vec![0.0; g.num_vertices()],
            residue_total: CompensatedSum::new(if total > 0 { 1.0 } else { 0.0 }),
            threshold: 1.0 / g.num_edges() as f64,
            alpha,
            pushes: 0,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Residues below this are never pushed.
    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn reserve(&self, s: StateId) -> f64 {
        self.reserve.get(&s).copied().unwrap_or(0.0)
    }

    pub fn residue(&self, s: StateId) -> f64 {
        self.residue.get(&s).copied().unwrap_or(0.0)
    }

    /// `t̂ppr(v)`, a lower bound on `tppr(v)`.
    #[inline]
    pub fn lower(&self, v: VertexId) -> f64 {
        self.lower[v.index()]
    }

    pub fn lower_bounds(&self) -> &[f64] {
        &self.lower
    }

    /// Total residue, clamped at zero against rounding.
    #[inline]
    pub fn residue_total(&self) -> f64 {
        self.residue_total.value().max(0.0)
    }

    pub fn reserve_total(&self) -> f64 {
        let mut sum = CompensatedSum::default();
        for &x in self.reserve.values() {
            sum.add(x);
        }
        sum.value()
    }

    /// Residues present, including zeros left by pushes.
    pub fn residues(&self) -> impl Iterator<Item = (StateId, f64)> + '_ {
        self.residue.iter().map(|(&s, &r)| (s, r))
    }

    /// Number of pushes performed so far.
    pub fn pushes(&self) -> usize {
        self.pushes
    }

    /// Lower and upper bound on `ρ_H(u)` where `in_h` marks `H`.
    pub fn degree_bounds(&self, g: &TemporalGraph, in_h: &[bool], u: VertexId) -> (f64, f64) {
        let lower: f64 = g
            .neighbors(u)
            .iter()
            .filter(|w| in_h[w.index()])
            .map(|&w| self.lower(w))
            .sum();
        (lower, lower + self.residue_total())
    }

    /// Pushes state `e` if its residue reaches the threshold. Returns the
    /// vertex whose lower bound grew and by how much.
    pub fn propagate<D: Decay>(
        &mut self,
        model: &TransitionModel<'_, D>,
        e: StateId,
    ) -> Option<(VertexId, f64)> {
        let r = self.residue(e);
        if r < self.threshold {
            return None;
        }
        let g = model.graph();
        let tail = g.tail(e);
        self.residue.insert(e, 0.0);
        self.residue_total.add(-r);
        self.pushes += 1;

        let kept = if g.is_dangling(e) {
            // the self-loop stops there with probability one eventually
            r
        } else {
            let spread = (1.0 - self.alpha) * r;
            for (next, p) in model.successor_probs(e) {
                let add = spread * p;
                *self.residue.entry(next).or_insert(0.0) += add;
                self.residue_total.add(add);
            }
            self.alpha * r
        };
        *self.reserve.entry(e).or_insert(0.0) += kept;
        self.lower[tail.index()] += kept;
        Some((tail, kept))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain3() -> TemporalGraph {
        TemporalGraph::from_edges([("q", "a", 1), ("a", "b", 2)]).unwrap()
    }

    #[test]
    fn chain_trace() {
        let g = chain3();
        let model = TransitionModel::new(&g);
        let v = |l| g.vertex(l).unwrap();
        let mut st = PushState::seeded(&g, &[v("q")], 0.2);
        let qa = g.find_state(v("q"), v("a"), 1).unwrap();
        let ab = g.find_state(v("a"), v("b"), 2).unwrap();
        assert_eq!(st.residue(qa), 1.0);

        st.propagate(&model, qa).unwrap();
        assert!((st.reserve(qa) - 0.2).abs() < 1e-15);
        assert!((st.lower(v("a")) - 0.2).abs() < 1e-15);
        assert!((st.residue(ab) - 0.8).abs() < 1e-15);
        let all = vec![true; 3];
        let (lo, hi) = st.degree_bounds(&g, &all, v("a"));
        assert_eq!(lo, 0.0);
        assert!((hi - 0.8).abs() < 1e-15);

        st.propagate(&model, ab).unwrap();
        assert!((st.lower(v("b")) - 0.8).abs() < 1e-15);
        assert!(st.residue_total() < 1e-15);
        assert!((st.reserve_total() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn below_threshold_is_a_no_op() {
        let g =
            TemporalGraph::from_edges([("q", "a", 1), ("q", "b", 2), ("q", "c", 3), ("a", "b", 4)])
                .unwrap();
        let model = TransitionModel::new(&g);
        let q = g.vertex("q").unwrap();
        let mut st = PushState::seeded(&g, &[q], 0.2);
        let s = g.out_states(q)[0];
        st.residue.insert(s, 1.0 / (2.0 * g.num_edges() as f64));
        let before = st.clone();
        assert!(st.propagate(&model, s).is_none());
        assert_eq!(st.residue(s), before.residue(s));
        assert_eq!(st.reserve_total(), 0.0);
        assert_eq!(st.pushes(), 0);
    }
}
