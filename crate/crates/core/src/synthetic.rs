//! Seeded random temporal graphs for tests, benchmarks and the `gen` command.

use std::collections::HashSet;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{GraphBuilder, TemporalGraph, Timestamp};

/// Parameters of the synthetic generator: a uniform random de-temporal graph
/// with `n * avg_degree / 2` edges, each carrying `timestamps_per_edge`
/// distinct timestamps drawn uniformly from `1..=horizon`.
#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticSpec {
    pub n: usize,
    pub avg_degree: f64,
    pub timestamps_per_edge: usize,
    pub horizon: Timestamp,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn static_edge_count(&self) -> usize {
        (self.n as f64 * self.avg_degree / 2.0).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.n < 2 {
            return bad(format!("n must be at least 2, got {}", self.n));
        }
        if self.avg_degree.is_nan() || self.avg_degree <= 0.0 || !self.avg_degree.is_finite() {
            return bad(format!(
                "avg degree must be positive, got {}",
                self.avg_degree
            ));
        }
        if self.timestamps_per_edge == 0 {
            return bad("timestamps per edge must be positive".into());
        }
        if self.horizon == 0 || (self.timestamps_per_edge as u64) > self.horizon {
            return bad(format!(
                "horizon {} cannot hold {} distinct timestamps per edge",
                self.horizon, self.timestamps_per_edge
            ));
        }
        let max_pairs = self.n * (self.n - 1) / 2;
        if self.static_edge_count() > max_pairs {
            return bad(format!(
                "average degree {} exceeds the simple-graph maximum for n = {}",
                self.avg_degree, self.n
            ));
        }
        if self.static_edge_count() == 0 {
            return bad("parameters produce no edges".into());
        }
        Ok(())
    }

    /// Edge stream `(u, v, t)` sorted by timestamp; ties keep generation order.
    pub fn edge_stream(&self) -> Result<Vec<(u32, u32, Timestamp)>> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let target = self.static_edge_count();
        let mut pairs = HashSet::with_capacity(target);
        let mut out = Vec::with_capacity(target * self.timestamps_per_edge);
        while pairs.len() < target {
            let u = rng.random_range(0..self.n as u32);
            let v = rng.random_range(0..self.n as u32);
            if u == v || !pairs.insert((u.min(v), u.max(v))) {
                continue;
            }
            let mut times: Vec<Timestamp> =
                index::sample(&mut rng, self.horizon as usize, self.timestamps_per_edge)
                    .into_iter()
                    .map(|i| i as Timestamp + 1)
                    .collect();
            times.sort_unstable();
            out.extend(times.into_iter().map(|t| (u, v, t)));
        }
        out.sort_by_key(|&(_, _, t)| t);
        Ok(out)
    }

    pub fn build(&self) -> Result<TemporalGraph> {
        let stream = self.edge_stream()?;
        let mut builder = GraphBuilder::new();
        for (u, v, t) in stream {
            builder.add_edge(&u.to_string(), &v.to_string(), t);
        }
        builder.build()
    }
}

/// Small random multigraph for property sweeps: `m` draws of a vertex pair
/// in `0..n` and a timestamp in `1..=max_time`. Self-loops and repeated
/// triples are discarded, so the result may have fewer than `m` edges.
pub fn random_temporal_graph(n: usize, m: usize, max_time: Timestamp, seed: u64) -> TemporalGraph {
    assert!(n >= 2 && m >= 1 && max_time >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut builder = GraphBuilder::new();
    for v in 0..n {
        builder.add_vertex(&v.to_string());
    }
    // one guaranteed edge keeps the graph non-empty
    builder.add_edge("0", "1", rng.random_range(1..=max_time));
    for _ in 1..m {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        let t = rng.random_range(1..=max_time);
        builder.add_edge(&u.to_string(), &v.to_string(), t);
    }
    builder.build().expect("graph has at least one edge")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(seed: u64) -> SyntheticSpec {
        SyntheticSpec {
            n: 100,
            avg_degree: 4.0,
            timestamps_per_edge: 2,
            horizon: 50,
            seed,
        }
    }

    #[test]
    fn deterministic_under_seed() {
        assert_eq!(
            spec(7).edge_stream().unwrap(),
            spec(7).edge_stream().unwrap()
        );
        assert_ne!(
            spec(7).edge_stream().unwrap(),
            spec(8).edge_stream().unwrap()
        );
    }

    #[test]
    fn edge_count_near_expectation() {
        for seed in 0..10 {
            let m = spec(seed).edge_stream().unwrap().len() as f64;
            let expected = 100.0 * 4.0 / 2.0 * 2.0;
            assert!((m - expected).abs() <= 0.2 * expected, "m = {m}");
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let mut s = spec(1);
        s.timestamps_per_edge = 60;
        assert!(s.validate().is_err());
        let mut s = spec(1);
        s.avg_degree = 200.0;
        assert!(s.validate().is_err());
        let mut s = spec(1);
        s.n = 1;
        assert!(s.validate().is_err());
    }
}
