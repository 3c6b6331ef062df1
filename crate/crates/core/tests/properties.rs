// SPDX-License-Identifier: Apache-2.0

use proptest::prelude::*;
use qalloc::allocation::{allocate_optimized, allocate_random, SaParams};
use qalloc::failure::{fail_node, kappa_hat, run_failure_sequence};
use qalloc::graph_state::{Basis, GraphState};
use qalloc::statevector::statevector_oracle_check;
use qalloc::topology::DECORATION_FACTOR;
use qalloc::{Coloring, EntanglementTopology, LabeledGraph};

fn graph(max_n: usize) -> impl Strategy<Value = LabeledGraph> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n), 0..=n * 2).prop_map(move |pairs| {
            let mut g = LabeledGraph::new(n);
            for (u, v) in pairs {
                if u != v {
                    g.add_edge(u, v).unwrap();
                }
            }
            g
        })
    })
}

fn lattice_topology() -> impl Strategy<Value = (usize, usize, usize, u64)> {
    (1usize..=5, 2usize..=6)
        .prop_flat_map(|(m, n)| (Just(m), Just(n), 2..=(m * n).min(6), any::<u64>()))
}

fn quick_sa() -> SaParams {
    SaParams {
        iterations: 300,
        ..SaParams::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distances_symmetric_and_triangular(g in graph(10)) {
        let rows: Vec<_> = (0..g.vertex_count()).map(|s| g.bfs_distances(&[s])).collect();
        for u in 0..g.vertex_count() {
            for v in 0..g.vertex_count() {
                prop_assert_eq!(rows[u][v], rows[v][u]);
                for w in 0..g.vertex_count() {
                    if let (Some(a), Some(b), Some(c)) = (rows[u][w], rows[u][v], rows[v][w]) {
                        prop_assert!(a <= b + c);
                    }
                }
            }
        }
    }

    #[test]
    fn local_complement_is_involution(g in graph(9), a in any::<prop::sample::Index>()) {
        let a = a.index(g.vertex_count());
        let state = GraphState::from_graph(g.clone());
        let twice = state.local_complement(a).unwrap().local_complement(a).unwrap();
        prop_assert_eq!(twice.graph(), &g);
    }

    #[test]
    fn deleting_a_vertex_never_raises_kappa(g in graph(9), picks in any::<(prop::sample::Index, prop::sample::Index, prop::sample::Index)>()) {
        let n = g.vertex_count();
        prop_assume!(n >= 3);
        let s = picks.0.index(n);
        let t = (s + 1 + picks.1.index(n - 1)) % n;
        let w = (0..n).filter(|&x| x != s && x != t).nth(picks.2.index(n - 2)).unwrap();
        let before = g.max_vertex_disjoint_paths(s, t).unwrap();
        let mut h = g.clone();
        h.remove_vertex(w).unwrap();
        prop_assert!(h.max_vertex_disjoint_paths(s, t).unwrap() <= before);
    }

    #[test]
    fn measurement_rules_match_statevector(g in graph(7), a in any::<prop::sample::Index>()) {
        let a = a.index(g.vertex_count());
        let state = GraphState::from_graph(g);
        for basis in Basis::ALL {
            let after = state.measure_pauli(a, basis, None).unwrap();
            prop_assert!(statevector_oracle_check(&state, a, basis, None, &after.result_graph).unwrap());
        }
    }

    #[test]
    fn memory_totals((m, n, c, seed) in lattice_topology(), mu in 1usize..=3, decorated: bool) {
        let coloring = allocate_random(&LabeledGraph::grid(m, n), c, seed).unwrap();
        let sizes = coloring.class_sizes();
        let t = EntanglementTopology::build_lattice(m, n, mu, decorated, coloring).unwrap();
        let factor = if decorated { DECORATION_FACTOR } else { 1 };
        let report = t.memory_report();
        prop_assert_eq!(report.total, mu * m * n * factor);
        for (node, size) in sizes.into_iter().enumerate() {
            prop_assert_eq!(report.per_node[node], mu * size * factor);
        }
    }

    #[test]
    fn annealer_balanced_and_deterministic((m, n, c, seed) in lattice_topology()) {
        let g = LabeledGraph::grid(m, n);
        let a = allocate_optimized(&g, c, seed, quick_sa()).unwrap();
        let b = allocate_optimized(&g, c, seed, quick_sa()).unwrap();
        prop_assert_eq!(&a, &b);
        let sizes = a.class_sizes();
        let (lo, hi) = (m * n / c, (m * n).div_ceil(c));
        prop_assert!(sizes.iter().all(|&s| s == lo || s == hi), "{:?}", sizes);
        prop_assert_eq!(sizes.iter().sum::<usize>(), m * n);
    }

    #[test]
    fn annealer_never_worse_than_its_start((m, n, c, seed) in lattice_topology()) {
        let g = LabeledGraph::grid(m, n);
        let report = qalloc::allocation::anneal(&g, c, seed, quick_sa()).unwrap();
        prop_assert!(report.best <= report.initial);
        let t = EntanglementTopology::build_lattice(m, n, 1, false, report.coloring).unwrap();
        prop_assert_eq!(t.minmax_objective().unwrap(), report.best.0);
    }

    #[test]
    fn decorated_survivors_contain_undecorated((m, n, c, seed) in lattice_topology(), order in any::<u64>()) {
        let coloring = allocate_random(&LabeledGraph::grid(m, n), c, seed).unwrap();
        let mut plain = EntanglementTopology::build_lattice(m, n, 1, false, coloring.clone()).unwrap();
        let mut deco = EntanglementTopology::build_lattice(m, n, 1, true, coloring).unwrap();
        let mut nodes: Vec<usize> = (0..c).collect();
        nodes.rotate_left((order % c as u64) as usize);
        for &node in &nodes[..c - 1] {
            plain = fail_node(&plain, node).unwrap();
            deco = fail_node(&deco, node).unwrap();
            for v in plain.connectivity().live_vertices() {
                prop_assert!(deco.connectivity().is_live(v));
            }
            for (u, v) in plain.connectivity().edges() {
                prop_assert!(deco.connectivity().has_edge(u, v));
            }
        }
    }

    #[test]
    fn failure_sequences_are_reproducible((m, n, c, seed) in lattice_topology(), decorated: bool) {
        let coloring = allocate_random(&LabeledGraph::grid(m, n), c, seed).unwrap();
        let t = EntanglementTopology::build_lattice(m, n, 1, decorated, coloring).unwrap();
        let a = run_failure_sequence(&t, c - 1, seed, true).unwrap();
        let b = run_failure_sequence(&t, c - 1, seed, true).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.steps.len(), c);
        // after re-healing no node spans two components
        for step in &a.steps {
            let labels = step.components.labels(m * n);
            for class in Coloring::new(t.coloring().assignment().to_vec(), c).unwrap().classes() {
                let spanned: std::collections::BTreeSet<_> =
                    class.iter().filter_map(|&v| labels[v]).collect();
                prop_assert!(spanned.len() <= 1);
            }
        }
        let last = a.steps.last().unwrap();
        prop_assert_eq!(last.kappa_hat, 0.0);
        prop_assert!(kappa_hat(&t).value >= 0.0);
    }

    #[test]
    fn edge_list_roundtrip(g in graph(12)) {
        prop_assert_eq!(LabeledGraph::parse_edge_list(&g.to_edge_list()).unwrap(), g);
    }
}
