use proptest::prelude::*;

use qtcs_core::als::{expand_observed, PushState};
use qtcs_core::community::greedy_removing;
use qtcs_core::synthetic::random_temporal_graph;
use qtcs_core::{
    compute_tppr, egr, load_edge_stream, query_biased_degree, temporal_conductance,
    temporal_density, write_edge_stream, QueryContext, TemporalGraph, TransitionModel, VertexId,
};

fn graphs() -> impl Strategy<Value = TemporalGraph> {
    (2usize..30, 1usize..200, 1u64..30, any::<u64>())
        .prop_map(|(n, m, t, seed)| random_temporal_graph(n, m, t, seed))
}

fn active(g: &TemporalGraph, pick: usize) -> VertexId {
    let live: Vec<VertexId> = g.vertices().filter(|&v| g.temporal_degree(v) > 0).collect();
    live[pick % live.len()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn edge_stream_round_trip(g in graphs()) {
        let mut buf = Vec::new();
        write_edge_stream(&g, &mut buf).unwrap();
        let (back, warnings) = load_edge_stream(&buf[..]).unwrap();
        prop_assert_eq!(warnings.total(), 0);
        let triples = |h: &TemporalGraph| -> Vec<(String, String, u64)> {
            h.edges().iter().map(|e| (h.label(e.u).to_owned(), h.label(e.v).to_owned(), e.t)).collect()
        };
        prop_assert_eq!(triples(&g), triples(&back));
        if g.vertices().all(|v| g.temporal_degree(v) > 0) {
            prop_assert_eq!(g, back);
        }
    }

    #[test]
    fn graph_invariants(g in graphs()) {
        let incidences: usize = g.vertices().map(|v| g.out_states(v).len()).sum();
        prop_assert_eq!(incidences, 2 * g.num_edges());
        for u in g.vertices() {
            for &w in g.neighbors(u) {
                prop_assert!(g.neighbors(w).contains(&u));
            }
            let times: Vec<u64> = g.out_states(u).iter().map(|&s| g.time(s)).collect();
            prop_assert!(times.windows(2).all(|w| w[0] <= w[1]));
        }
        for s in (0..g.num_states() as u32).map(qtcs_core::StateId) {
            let succ = g.successors(s);
            prop_assert_eq!(succ.is_empty(), g.is_dangling(s));
            for &x in succ {
                prop_assert_eq!(g.head(x), g.tail(s));
                prop_assert!(g.time(x) > g.time(s));
            }
            let later = g.out_states(g.tail(s)).iter().filter(|&&x| g.time(x) > g.time(s)).count();
            prop_assert_eq!(later, succ.len());
        }
    }

    #[test]
    fn transition_rows_sum_to_one(g in graphs()) {
        let model = TransitionModel::new(&g);
        for s in (0..g.num_states() as u32).map(qtcs_core::StateId) {
            let row: f64 = if g.is_dangling(s) {
                model.transition_prob(s, s)
            } else {
                model.successor_probs(s).map(|(_, p)| p).sum()
            };
            prop_assert!((row - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn tppr_is_a_distribution(g in graphs(), pick in any::<usize>(), alpha in 0.05f64..0.95) {
        let t = compute_tppr(&g, active(&g, pick), alpha).unwrap();
        prop_assert!((t.total() - 1.0).abs() < 1e-9);
        prop_assert!(t.scores().iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn shrinking_never_raises_degree(g in graphs(), pick in any::<usize>(), bits in any::<u64>(), sub in any::<u64>()) {
        let t = compute_tppr(&g, active(&g, pick), 0.2).unwrap();
        let h: Vec<VertexId> = g.vertices().filter(|v| bits >> (v.0 % 64) & 1 == 1).collect();
        let s: Vec<VertexId> = h.iter().copied().filter(|v| sub >> (v.0 % 61) & 1 == 1).collect();
        for &u in &s {
            prop_assert!(query_biased_degree(&t, &g, &s, u) <= query_biased_degree(&t, &g, &h, u));
        }
    }

    #[test]
    fn egr_result_is_feasible(g in graphs(), pick in any::<usize>()) {
        let q = active(&g, pick);
        let r = egr(&g, &QueryContext::single(q, 0.2).unwrap()).unwrap();
        prop_assert!(r.contains(q));
        prop_assert_eq!(g.connected_component(&r.community, q).unwrap(), r.community.clone());
        let t = compute_tppr(&g, q, 0.2).unwrap();
        let min = r.community.iter()
            .map(|&u| query_biased_degree(&t, &g, &r.community, u))
            .fold(f64::INFINITY, f64::min);
        prop_assert!((min - r.beta).abs() <= 1e-12);
        let again = greedy_removing(&g, &t, &[q]).unwrap();
        prop_assert_eq!(again.0, r.community);
    }

    #[test]
    fn push_conserves_mass(g in graphs(), pick in any::<usize>()) {
        let q = active(&g, pick);
        let model = TransitionModel::new(&g);
        let mut st = PushState::seeded(&g, &[q], 0.2);
        let order: Vec<_> = (0..g.num_states() as u32).map(qtcs_core::StateId).collect();
        for _ in 0..3 {
            for &s in &order {
                st.propagate(&model, s);
                prop_assert!((st.reserve_total() + st.residue_total() - 1.0).abs() < 1e-9);
                prop_assert!(st.residue_total() >= 0.0);
            }
        }
        for (_, r) in st.residues() {
            prop_assert!(r >= 0.0);
        }
    }

    #[test]
    fn expansion_keeps_residues_consistent(g in graphs(), pick in any::<usize>()) {
        let q = active(&g, pick);
        let model = TransitionModel::new(&g);
        expand_observed(&model, &[q], 0.2, |step| {
            let total: f64 = step.push.residues().map(|(_, r)| r).sum();
            assert!((total - step.push.residue_total()).abs() < 1e-9);
            assert!((step.push.reserve_total() + step.push.residue_total() - 1.0).abs() < 1e-9);
            for (_, r) in step.push.residues() {
                assert!(r >= 0.0);
            }
        });
    }

    #[test]
    fn metrics_stay_in_range(g in graphs(), bits in any::<u64>()) {
        let s: Vec<VertexId> = g.vertices().filter(|v| bits >> (v.0 % 64) & 1 == 1).collect();
        let rest: Vec<VertexId> = g.vertices().filter(|v| bits >> (v.0 % 64) & 1 == 0).collect();
        let td = temporal_density(&g, &s);
        let tc = temporal_conductance(&g, &s);
        prop_assert!((0.0..=1.0).contains(&td));
        prop_assert!((0.0..=1.0).contains(&tc));
        if !s.is_empty() && !rest.is_empty() {
            prop_assert_eq!(tc, temporal_conductance(&g, &rest));
        }
    }

    #[test]
    fn egr_is_deterministic(g in graphs(), pick in any::<usize>()) {
        let ctx = QueryContext::single(active(&g, pick), 0.2).unwrap();
        let a = egr(&g, &ctx).unwrap();
        let b = egr(&g, &ctx).unwrap();
        prop_assert_eq!(a.community, b.community);
        prop_assert_eq!(a.beta.to_bits(), b.beta.to_bits());
    }
}
