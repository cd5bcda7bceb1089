//! Approximate local search: expand a candidate set around the queries with
//! forward-push bounds, then peel it down to a set whose minimum degree is
//! within a certified factor of the optimum.

pub mod expand;
pub mod push;
pub mod reduce;

use std::time::{Duration, Instant};

pub use expand::{expand, expand_observed, ExpandStep, Expansion};
pub use push::PushState;
pub use reduce::{reduce, Reduction};

use crate::community::{Algorithm, CommunityResult, Timings};
use crate::error::{Error, Result};
use crate::graph::{TemporalGraph, VertexId};
use crate::tppr::QueryContext;
use crate::transition::{Decay, TransitionModel};

#[derive(Clone, Debug, PartialEq)]
pub struct ApproxResult {
    /// Sorted by vertex id.
    pub community: Vec<VertexId>,
    /// `β* <= epsilon * beta_lower`. Infinite when nothing was certified.
    pub epsilon: f64,
    /// The first reduction round would have removed a query vertex.
    pub fallback: bool,
    pub beta_lower: f64,
    pub beta_upper: f64,
    /// Size of the candidate set after expansion.
    pub expanded: usize,
    pub pushes: usize,
    pub expand_time: Duration,
    pub reduce_time: Duration,
}

impl ApproxResult {
    /// Whether `beta_star` is consistent with the certificate.
    pub fn certifies(&self, beta_star: f64) -> bool {
        self.epsilon.is_infinite()
            || beta_star <= self.epsilon * self.beta_lower * (1.0 + 1e-9) + 1e-15
    }

    /// Ratio between an exact optimum and the certified lower value, with
    /// `0 / 0` read as 1.
    pub fn true_ratio(&self, beta_star: f64) -> f64 {
        if self.beta_lower == 0.0 {
            if beta_star == 0.0 {
                1.0
            } else {
                f64::INFINITY
            }
        } else {
            beta_star / self.beta_lower
        }
    }

    pub fn into_community_result(self) -> CommunityResult {
        CommunityResult {
            beta: self.beta_lower,
            community: self.community,
            algorithm: Algorithm::Als,
            timings: Timings {
                tppr: self.expand_time,
                search: self.reduce_time,
            },
        }
    }
}

/// Single-query search.
pub fn als(g: &TemporalGraph, ctx: &QueryContext) -> Result<ApproxResult> {
    if !ctx.is_single() {
        return Err(Error::InvalidParameter(
            "als takes a single query vertex; use als_multi".into(),
        ));
    }
    als_with(&TransitionModel::new(g), ctx)
}

pub fn als_multi(g: &TemporalGraph, ctx: &QueryContext) -> Result<ApproxResult> {
    als_with(&TransitionModel::new(g), ctx)
}

pub fn als_with<D: Decay>(
    model: &TransitionModel<'_, D>,
    ctx: &QueryContext,
) -> Result<ApproxResult> {
    let g = model.graph();
    ctx.validate(g)?;
    if !g.seeds_connected(&vec![true; g.num_vertices()], ctx.queries()) {
        return Err(Error::QueriesDisconnected);
    }
    let started = Instant::now();
    let x = expand(model, ctx.queries(), ctx.alpha());
    let expand_time = started.elapsed();
    let started = Instant::now();
    let r = reduce(g, &x.candidates, &x.push, ctx.queries());
    Ok(ApproxResult {
        community: r.community,
        epsilon: r.epsilon,
        fallback: r.fallback,
        beta_lower: r.beta_lower,
        beta_upper: r.beta_upper,
        expanded: x.candidates.len(),
        pushes: x.push.pushes(),
        expand_time,
        reduce_time: started.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri() -> TemporalGraph {
        TemporalGraph::from_edges([("q", "a", 1), ("q", "b", 1), ("a", "b", 2)]).unwrap()
    }

    fn chain3() -> TemporalGraph {
        TemporalGraph::from_edges([("q", "a", 1), ("a", "b", 2)]).unwrap()
    }

    fn ctx(g: &TemporalGraph, labels: &[&str]) -> QueryContext {
        QueryContext::new(labels.iter().map(|l| g.vertex(l).unwrap()), 0.2).unwrap()
    }

    #[test]
    fn triangle() {
        let g = tri();
        let r = als(&g, &ctx(&g, &["q"])).unwrap();
        assert_eq!(r.community.len(), 3);
        assert!(r.fallback);
        assert!((r.epsilon - 2.0).abs() < 1e-12);
        assert!((r.true_ratio(0.5) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chain() {
        let g = chain3();
        let r = als(&g, &ctx(&g, &["q"])).unwrap();
        assert_eq!(r.community.len(), 3);
        assert!(r.fallback);
        assert!((r.epsilon - 4.0).abs() < 1e-12);
        assert!((r.beta_lower - 0.2).abs() < 1e-12);
        assert!(r.certifies(0.2));
    }

    #[test]
    fn singleton_candidate_set() {
        let g = tri();
        let q = g.vertex("q").unwrap();
        let push = PushState::seeded(&g, &[q], 0.2);
        let r = reduce(&g, &[q], &push, &[q]);
        assert_eq!(r.community, vec![q]);
        assert_eq!(r.epsilon, 1.0);
        assert_eq!(r.beta_lower, 0.0);
    }

    #[test]
    fn multi_query() {
        let g = tri();
        let r = als_multi(&g, &ctx(&g, &["q", "a"])).unwrap();
        assert_eq!(r.community.len(), 3);
        assert!(r.certifies(0.5));

        let split = TemporalGraph::from_edges([("q", "a", 1), ("x", "y", 2)]).unwrap();
        assert!(matches!(
            als_multi(&split, &ctx(&split, &["q", "x"])),
            Err(Error::QueriesDisconnected)
        ));
        assert!(matches!(
            als(&g, &ctx(&g, &["q", "a"])),
            Err(Error::InvalidParameter(_))
        ));
    }
}
