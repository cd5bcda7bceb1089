//! Time-constrained personalized PageRank.
//!
//! The score of `u` is the stop probability at `u` of an α-discounted walk
//! over ordered edge states, started uniformly on the query vertex's
//! outgoing states. [`compute_tppr`] evaluates it with one pass over the
//! edge stream; [`oracle`] solves the same fixed point by power iteration
//! and exists to check the streaming pass.

pub mod oracle;

use crate::error::{Error, Result};
use crate::graph::{StateId, TemporalGraph, Timestamp, VertexId};
use crate::par;
use crate::transition::{Decay, TransitionModel};

pub const DEFAULT_ALPHA: f64 = 0.2;

/// Query vertices and teleportation probability.
#[derive(Clone, Debug, PartialEq)]
pub struct QueryContext {
    queries: Vec<VertexId>,
    alpha: f64,
}

impl QueryContext {
    /// Repeated query vertices are collapsed, keeping first occurrence.
    pub fn new(queries: impl IntoIterator<Item = VertexId>, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (0, 1), got {alpha}"
            )));
        }
        let mut unique = Vec::new();
        for q in queries {
            if !unique.contains(&q) {
                unique.push(q);
            }
        }
        if unique.is_empty() {
            return Err(Error::InvalidParameter(
                "at least one query vertex is required".into(),
            ));
        }
        Ok(QueryContext {
            queries: unique,
            alpha,
        })
    }

    pub fn single(q: VertexId, alpha: f64) -> Result<Self> {
        Self::new([q], alpha)
    }

    pub fn queries(&self) -> &[VertexId] {
        &self.queries
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn is_single(&self) -> bool {
        self.queries.len() == 1
    }

    /// Every query vertex must exist in `g` and have an incident edge.
    pub fn validate(&self, g: &TemporalGraph) -> Result<()> {
        for &q in &self.queries {
            if q.index() >= g.num_vertices() {
                return Err(Error::QueryNotInSet(q));
            }
            if g.temporal_degree(q) == 0 {
                return Err(Error::NoQueryActivity(q));
            }
        }
        Ok(())
    }
}

/// Per-vertex scores for one query context.
#[derive(Clone, Debug, PartialEq)]
pub struct TpprVector {
    scores: Vec<f64>,
    queries: Vec<VertexId>,
    alpha: f64,
}

impl TpprVector {
    pub(crate) fn new(scores: Vec<f64>, queries: Vec<VertexId>, alpha: f64) -> Self {
        TpprVector {
            scores,
            queries,
            alpha,
        }
    }

    #[inline]
    pub fn get(&self, u: VertexId) -> f64 {
        self.scores[u.index()]
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn queries(&self) -> &[VertexId] {
        &self.queries
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn total(&self) -> f64 {
        self.scores.iter().sum()
    }

    /// Largest per-vertex absolute difference.
    pub fn max_abs_diff(&self, other: &TpprVector) -> f64 {
        self.scores
            .iter()
            .zip(&other.scores)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Stop probabilities `D[u][t]` of the streaming pass, one entry per
/// (vertex, distinct incident timestamp). Entries for dangling slots are
/// stored before the `1/α` correction.
#[derive(Clone, Debug)]
pub struct StopMassTable<'g> {
    graph: &'g TemporalGraph,
    mass: Vec<f64>,
    alpha: f64,
}

impl<'g> StopMassTable<'g> {
    /// `D[u][t]`, zero when `u` has no edge at `t`.
    pub fn get(&self, u: VertexId, t: Timestamp) -> f64 {
        let range = self.graph.slot_range(u);
        match self.graph.distinct_times(u).binary_search(&t) {
            Ok(i) => self.mass[range.start + i],
            Err(_) => 0.0,
        }
    }

    /// Non-zero entries of `D[u]` in time order.
    pub fn entries(&self, u: VertexId) -> impl Iterator<Item = (Timestamp, f64)> + '_ {
        self.graph
            .slot_range(u)
            .map(|s| (self.graph.slot_time(s), self.mass[s]))
            .filter(|&(_, m)| m != 0.0)
    }

    /// Sums each vertex's entries, dividing dangling ones by α.
    pub fn to_scores(&self) -> Vec<f64> {
        let g = self.graph;
        g.vertices()
            .map(|u| {
                g.slot_range(u)
                    .map(|s| {
                        if g.is_last_slot(s) {
                            self.mass[s] / self.alpha
                        } else {
                            self.mass[s]
                        }
                    })
                    .sum()
            })
            .collect()
    }
}

/// Streaming pass over the edge stream for a single query vertex.
pub fn compute_stop_mass<'g, D: Decay>(
    model: &TransitionModel<'g, D>,
    q: VertexId,
    alpha: f64,
) -> Result<StopMassTable<'g>> {
    let g = model.graph();
    QueryContext::single(q, alpha)?.validate(g)?;

    let keep = 1.0 - alpha;
    let seed = alpha / g.temporal_degree(q) as f64;
    let mut mass = vec![0.0f64; g.num_slots()];
    let inflow = |from: usize, to: usize, t: Timestamp, mass: &[f64]| -> f64 {
        let mut gain = 0.0;
        for (slot, &d) in mass[from..to].iter().enumerate() {
            if d != 0.0 {
                gain += d * model.slot_transition(from + slot, t);
            }
        }
        gain
    };

    for (i, e) in g.edges().iter().enumerate() {
        // slot of <u, v, t> at v and of <v, u, t> at u
        let (fs, bs) = (StateId::new(i, false), StateId::new(i, true));
        let forward = g.tail_slot(fs);
        let backward = g.tail_slot(bs);

        // Only earlier slots of u continue into <u, v, t>; same-time entries
        // contribute nothing since continuations need a strictly later time.
        mass[forward] += keep * inflow(g.tail_first_slot(bs), backward, e.t, &mass);
        if e.u == q {
            mass[forward] += seed;
        }
        mass[backward] += keep * inflow(g.tail_first_slot(fs), forward, e.t, &mass);
        if e.v == q {
            mass[backward] += seed;
        }
    }

    Ok(StopMassTable {
        graph: g,
        mass,
        alpha,
    })
}

/// TPPR of every vertex with respect to `q`.
pub fn compute_tppr(g: &TemporalGraph, q: VertexId, alpha: f64) -> Result<TpprVector> {
    compute_tppr_with(&TransitionModel::new(g), q, alpha)
}

pub fn compute_tppr_with<D: Decay>(
    model: &TransitionModel<'_, D>,
    q: VertexId,
    alpha: f64,
) -> Result<TpprVector> {
    let table = compute_stop_mass(model, q, alpha)?;
    Ok(TpprVector::new(table.to_scores(), vec![q], alpha))
}

/// Mean of the per-query vectors. Per-query passes run in parallel; the
/// mean is accumulated in query order, so results do not depend on
/// scheduling.
pub fn compute_tppr_multi(g: &TemporalGraph, ctx: &QueryContext) -> Result<TpprVector> {
    compute_tppr_multi_with(&TransitionModel::new(g), ctx)
}

pub fn compute_tppr_multi_with<D: Decay>(
    model: &TransitionModel<'_, D>,
    ctx: &QueryContext,
) -> Result<TpprVector> {
    ctx.validate(model.graph())?;
    if let [q] = ctx.queries() {
        return compute_tppr_with(model, *q, ctx.alpha());
    }
    let parts = par::map(ctx.queries(), |&q| compute_tppr_with(model, q, ctx.alpha()));
    let n = model.graph().num_vertices();
    let mut scores = vec![0.0; n];
    for part in parts {
        for (acc, x) in scores.iter_mut().zip(part?.scores()) {
            *acc += x;
        }
    }
    let k = ctx.queries().len() as f64;
    for x in &mut scores {
        *x /= k;
    }
    Ok(TpprVector::new(scores, ctx.queries().to_vec(), ctx.alpha()))
}
