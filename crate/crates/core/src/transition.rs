//! Temporal transition probabilities between ordered edge states.
//!
//! From a state entering `u` at time `t0`, the walk moves to an outgoing state
//! of `u` at time `t > t0` with probability `g(t - t0) / denom(u, t0)`, where
//! `denom(u, t0)` sums `g` over all such continuations. Dangling states keep a
//! probability-1 self-loop.

use std::sync::OnceLock;

use crate::graph::{StateId, TemporalGraph, Timestamp};

/// Weight of a continuation `gap` time units after arrival. `gap > 0`.
pub trait Decay: Sync {
    fn weight(&self, gap: Timestamp) -> f64;
}

/// `g(gap) = 1 / gap`.
#[derive(Copy, Clone, Debug, Default)]
pub struct LinearDecay;

impl Decay for LinearDecay {
    #[inline]
    fn weight(&self, gap: Timestamp) -> f64 {
        1.0 / gap as f64
    }
}

impl<F: Fn(Timestamp) -> f64 + Sync> Decay for F {
    fn weight(&self, gap: Timestamp) -> f64 {
        self(gap)
    }
}

/// Transition structure over a graph with lazily memoised denominators,
/// one per (vertex, distinct timestamp). Safe to share between threads.
pub struct TransitionModel<'g, D: Decay = LinearDecay> {
    graph: &'g TemporalGraph,
    decay: D,
    denominators: Vec<OnceLock<f64>>,
}

impl<'g> TransitionModel<'g, LinearDecay> {
    pub fn new(graph: &'g TemporalGraph) -> Self {
        Self::with_decay(graph, LinearDecay)
    }
}

impl<'g, D: Decay> TransitionModel<'g, D> {
    pub fn with_decay(graph: &'g TemporalGraph, decay: D) -> Self {
        let denominators = (0..graph.num_slots()).map(|_| OnceLock::new()).collect();
        TransitionModel {
            graph,
            decay,
            denominators,
        }
    }

    #[inline]
    pub fn graph(&self) -> &'g TemporalGraph {
        self.graph
    }

    #[inline]
    pub fn decay(&self) -> &D {
        &self.decay
    }

    /// `denom` for slot `slot`, computed on first use in O(distinct times).
    #[inline]
    pub(crate) fn slot_denominator(&self, slot: usize) -> f64 {
        *self.denominators[slot].get_or_init(|| self.compute_denominator(slot))
    }

    fn compute_denominator(&self, slot: usize) -> f64 {
        let g = self.graph;
        let t0 = g.slot_time(slot);
        (slot + 1..g.owner_slot_end(slot))
            .map(|later| {
                g.slot_multiplicity(later) as f64 * self.decay.weight(g.slot_time(later) - t0)
            })
            .sum()
    }

    /// Probability of moving from a state entering `slot` to a continuation
    /// at time `to_time > time(slot)`.
    #[inline]
    pub(crate) fn slot_transition(&self, slot: usize, to_time: Timestamp) -> f64 {
        let from = self.graph.slot_time(slot);
        debug_assert!(to_time > from);
        self.decay.weight(to_time - from) / self.slot_denominator(slot)
    }

    /// Denominator that normalises the continuations of `s`; zero when `s`
    /// is dangling.
    pub fn denominator(&self, s: StateId) -> f64 {
        self.slot_denominator(self.graph.tail_slot(s))
    }

    /// `P(from -> to)` including the dangling self-loop.
    pub fn transition_prob(&self, from: StateId, to: StateId) -> f64 {
        let g = self.graph;
        if g.is_dangling(from) {
            return if from == to { 1.0 } else { 0.0 };
        }
        if g.head(to) != g.tail(from) || g.time(to) <= g.time(from) {
            return 0.0;
        }
        self.slot_transition(g.tail_slot(from), g.time(to))
    }

    /// Probabilities of all continuations of a non-dangling state, in the
    /// order of [`TemporalGraph::successors`].
    pub fn successor_probs(&self, s: StateId) -> impl Iterator<Item = (StateId, f64)> + '_ {
        let g = self.graph;
        let slot = g.tail_slot(s);
        g.successors(s)
            .iter()
            .map(move |&next| (next, self.slot_transition(slot, g.time(next))))
    }
}
