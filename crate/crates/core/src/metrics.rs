//! Community quality metrics.

use std::collections::BTreeSet;

use crate::community::{mask_of, min_degree};
use crate::graph::{TemporalGraph, Timestamp, VertexId};
use crate::tppr::TpprVector;

#[derive(Clone, Debug, PartialEq)]
pub struct MetricReport {
    pub td: f64,
    pub tc: f64,
    pub md: f64,
    pub size: usize,
    /// Distinct timestamps on internal edges.
    pub timestamps: usize,
}

impl MetricReport {
    pub fn compute(g: &TemporalGraph, tppr: &TpprVector, set: &[VertexId]) -> Self {
        MetricReport {
            td: temporal_density(g, set),
            tc: temporal_conductance(g, set),
            md: min_query_biased_degree(tppr, g, set),
            size: set.len(),
            timestamps: internal_times(g, &mask_of(g.num_vertices(), set)).len(),
        }
    }
}

fn internal_times(g: &TemporalGraph, mask: &[bool]) -> BTreeSet<Timestamp> {
    g.edges()
        .iter()
        .filter(|e| mask[e.u.index()] && mask[e.v.index()])
        .map(|e| e.t)
        .collect()
}

/// `2 |internal edges| / (|S| (|S| - 1) |T_S|)`; zero for `|S| <= 1` or no
/// internal edges.
pub fn temporal_density(g: &TemporalGraph, set: &[VertexId]) -> f64 {
    let mask = mask_of(g.num_vertices(), set);
    let size = mask.iter().filter(|&&m| m).count();
    if size <= 1 {
        return 0.0;
    }
    let internal = g
        .edges()
        .iter()
        .filter(|e| mask[e.u.index()] && mask[e.v.index()])
        .count();
    let times = internal_times(g, &mask).len();
    if times == 0 {
        return 0.0;
    }
    2.0 * internal as f64 / (size as f64 * (size as f64 - 1.0) * times as f64)
}

/// Temporal edges crossing the boundary over the smaller side's incidence
/// volume; zero when nothing crosses.
pub fn temporal_conductance(g: &TemporalGraph, set: &[VertexId]) -> f64 {
    let mask = mask_of(g.num_vertices(), set);
    let (mut cut, mut inside, mut outside) = (0usize, 0usize, 0usize);
    for e in g.edges() {
        match (mask[e.u.index()], mask[e.v.index()]) {
            (true, true) => inside += 2,
            (false, false) => outside += 2,
            _ => {
                cut += 1;
                inside += 1;
                outside += 1;
            }
        }
    }
    if cut == 0 {
        return 0.0;
    }
    cut as f64 / inside.min(outside) as f64
}

/// Minimum over `set` of the query-biased degree within `set`.
pub fn min_query_biased_degree(tppr: &TpprVector, g: &TemporalGraph, set: &[VertexId]) -> f64 {
    min_degree(g, tppr.scores(), set)
}
