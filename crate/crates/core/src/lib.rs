//! Time-constrained personalized PageRank over temporal graphs and
//! query-centered community search on top of it.
//!
//! A temporal graph is loaded from a `u v t` edge stream. [`tppr`] computes
//! the stop distribution of time-respecting random walks started at a query
//! vertex, [`community`] finds the exact community maximizing the minimum
//! query-biased degree, and [`als`] approximates it locally with a
//! certified ratio.

pub mod als;
pub mod batch;
pub mod community;
pub mod error;
pub mod graph;
pub mod metrics;
pub mod numeric;
pub mod par;
pub mod synthetic;
pub mod tppr;
pub mod transition;

pub use als::{als, als_multi, als_with, ApproxResult};
pub use community::{
    brute_force_qtcs, egr, egr_multi, egr_with, qtcs_baseline, query_biased_degree, Algorithm,
    CommunityResult, DegreeMap,
};
pub use error::{Error, Result};
pub use graph::{
    load_edge_stream, write_edge_stream, GraphBuilder, LoadWarnings, StateId, TemporalEdge,
    TemporalGraph, Timestamp, VertexId,
};
pub use metrics::{min_query_biased_degree, temporal_conductance, temporal_density, MetricReport};
pub use tppr::{compute_tppr, compute_tppr_multi, QueryContext, TpprVector, DEFAULT_ALPHA};
pub use transition::{Decay, LinearDecay, TransitionModel};
