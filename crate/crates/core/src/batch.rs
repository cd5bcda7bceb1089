//! Independent single-vertex queries over one shared transition model.
//!
//! The model memoises denominators behind `OnceLock`, so queries running on
//! different threads share that work. Results come back in input order in
//! both execution modes.

use crate::als::{als_with, ApproxResult};
use crate::community::{egr_with, CommunityResult};
use crate::error::Result;
use crate::graph::VertexId;
use crate::par;
use crate::tppr::{compute_tppr_with, QueryContext, TpprVector};
use crate::transition::{Decay, TransitionModel};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Execution {
    /// Rayon pool when the `parallel` feature is on, otherwise sequential.
    Parallel,
    Sequential,
}

fn run<T: Send>(
    queries: &[VertexId],
    exec: Execution,
    f: impl Fn(&VertexId) -> T + Sync + Send,
) -> Vec<T> {
    match exec {
        Execution::Parallel => par::map(queries, f),
        Execution::Sequential => par::map_sequential(queries, f),
    }
}

pub fn tppr_batch<D: Decay>(
    model: &TransitionModel<'_, D>,
    queries: &[VertexId],
    alpha: f64,
    exec: Execution,
) -> Vec<Result<TpprVector>> {
    run(queries, exec, |&q| compute_tppr_with(model, q, alpha))
}

pub fn egr_batch<D: Decay>(
    model: &TransitionModel<'_, D>,
    queries: &[VertexId],
    alpha: f64,
    exec: Execution,
) -> Vec<Result<CommunityResult>> {
    run(queries, exec, |&q| {
        egr_with(model, &QueryContext::single(q, alpha)?)
    })
}

pub fn als_batch<D: Decay>(
    model: &TransitionModel<'_, D>,
    queries: &[VertexId],
    alpha: f64,
    exec: Execution,
) -> Vec<Result<ApproxResult>> {
    run(queries, exec, |&q| {
        als_with(model, &QueryContext::single(q, alpha)?)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::random_temporal_graph;

    #[test]
    fn modes_agree() {
        let g = random_temporal_graph(60, 400, 40, 11);
        let model = TransitionModel::new(&g);
        let queries: Vec<VertexId> = g.vertices().filter(|&v| g.temporal_degree(v) > 0).collect();
        let a = egr_batch(&model, &queries, 0.2, Execution::Parallel);
        let b = egr_batch(
            &TransitionModel::new(&g),
            &queries,
            0.2,
            Execution::Sequential,
        );
        for (x, y) in a.iter().zip(&b) {
            let (x, y) = (x.as_ref().unwrap(), y.as_ref().unwrap());
            assert_eq!(x.community, y.community);
            assert_eq!(x.beta.to_bits(), y.beta.to_bits());
        }
        let a = als_batch(&model, &queries, 0.2, Execution::Parallel);
        let b = als_batch(&model, &queries, 0.2, Execution::Sequential);
        for (x, y) in a.iter().zip(&b) {
            let (x, y) = (x.as_ref().unwrap(), y.as_ref().unwrap());
            assert_eq!(x.community, y.community);
            assert_eq!(x.epsilon.to_bits(), y.epsilon.to_bits());
        }
    }
}
