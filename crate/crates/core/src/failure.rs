// SPDX-License-Identifier: Apache-2.0

//! Nested node failures on entanglement topologies.
//!
//! A failed node loses all of its logical vertices. Without decorations the
//! logical neighbours of those vertices are Z-measured away as well, opening
//! a larger hole; with decorations the neighbours survive intact. Re-healing
//! then joins components that still share a node using local operations
//! among that node's own qubits.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::allocation::seeded_rng;
use crate::error::{Error, Result};
use crate::graph::{ComponentPartition, LabeledGraph};
use crate::topology::{mean_kappa, objective_summary, EntanglementTopology};

/// Removes node `c` from the topology.
///
/// A node whose class is already empty (e.g. consumed by an earlier
/// undecorated failure, or never allocated) fails without touching the
/// graph.
pub fn fail_node(t: &EntanglementTopology, c: usize) -> Result<EntanglementTopology> {
    if c >= t.node_count() {
        return Err(Error::invalid(format!("unknown node {c}")));
    }
    if t.is_failed(c) {
        return Err(Error::invalid(format!("node {c} has already failed")));
    }
    let class = t.color_class(c);
    let mut doomed = class.clone();
    if !t.decorated() {
        doomed.extend(class.iter().flat_map(|&v| t.connectivity().neighbors(v)));
        doomed.sort_unstable();
        doomed.dedup();
    }
    let mut next = t.clone();
    let (graph, failed) = next.parts_mut();
    for v in doomed {
        graph.remove_vertex(v)?;
    }
    failed.insert(c);
    Ok(next)
}

/// Adds same-node edges until no node's class spans two components.
///
/// For each spanning node, the lowest-id class member of every spanned
/// component is taken as representative and the first representative is
/// joined to all others. Returns the healed topology and the number of
/// edges added.
pub fn reheal(t: &EntanglementTopology) -> (EntanglementTopology, usize) {
    let mut next = t.clone();
    let mut added = 0;
    loop {
        let mut changed = false;
        for c in 0..t.node_count() {
            let class = next.color_class(c);
            if class.len() < 2 {
                continue;
            }
            let labels = next
                .connectivity()
                .connected_components()
                .labels(next.connectivity().vertex_count());
            let mut reps: BTreeMap<usize, usize> = BTreeMap::new();
            for &v in &class {
                let label = labels[v].expect("live vertex has a component");
                reps.entry(label).or_insert(v);
            }
            if reps.len() < 2 {
                continue;
            }
            let mut reps: Vec<usize> = reps.into_values().collect();
            reps.sort_unstable();
            let (graph, _) = next.parts_mut();
            for &r in &reps[1..] {
                if graph
                    .add_edge(reps[0], r)
                    .expect("representatives are live")
                {
                    added += 1;
                }
            }
            changed = true;
        }
        if !changed {
            return (next, added);
        }
    }
}

/// Per-component average of a metric, with the count of components that
/// hold fewer than two nodes and were left out.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentMetric {
    pub value: f64,
    pub qualifying: usize,
    pub excluded: usize,
}

/// Live color classes inside each component, keeping only nonempty ones.
fn component_classes(t: &EntanglementTopology, parts: &ComponentPartition) -> Vec<Vec<Vec<usize>>> {
    parts
        .iter()
        .map(|comp| {
            let mut by_node: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for &v in comp {
                by_node.entry(t.coloring().node_of(v)).or_default().push(v);
            }
            by_node.into_values().collect()
        })
        .collect()
}

fn per_component(
    t: &EntanglementTopology,
    metric: impl Fn(&LabeledGraph, &[Vec<usize>]) -> f64,
) -> ComponentMetric {
    let parts = t.connectivity().connected_components();
    let mut sum = 0.0;
    let mut qualifying = 0;
    for classes in component_classes(t, &parts) {
        if classes.len() >= 2 {
            sum += metric(t.connectivity(), &classes);
            qualifying += 1;
        }
    }
    ComponentMetric {
        value: if qualifying == 0 {
            0.0
        } else {
            sum / qualifying as f64
        },
        qualifying,
        excluded: parts.len() - qualifying,
    }
}

/// κ̂: mean over multi-node components of κ̄ restricted to the component.
pub fn kappa_hat(t: &EntanglementTopology) -> ComponentMetric {
    per_component(t, |g, classes| {
        mean_kappa(g, classes).expect("component holds at least two nodes")
    })
}

/// 𝒟̂: mean over multi-node components of `max_c 𝒟_c` within the component.
pub fn d_hat(t: &EntanglementTopology) -> ComponentMetric {
    per_component(t, |g, classes| {
        objective_summary(g, classes)
            .expect("component holds at least two nodes")
            .minmax as f64
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// Node failed at this step; `None` for the intact starting point.
    pub failed_node: Option<usize>,
    #[serde(skip)]
    pub surviving_graph: LabeledGraph,
    pub components: ComponentPartition,
    pub kappa_hat: f64,
    pub d_hat: f64,
    /// Components holding fewer than two nodes.
    pub excluded_components: usize,
    pub reheal_edges: usize,
}

impl StepRecord {
    pub fn measure(
        t: &EntanglementTopology,
        failed_node: Option<usize>,
        reheal_edges: usize,
    ) -> Self {
        let kappa = kappa_hat(t);
        let dist = d_hat(t);
        Self {
            failed_node,
            surviving_graph: t.connectivity().clone(),
            components: t.connectivity().connected_components(),
            kappa_hat: kappa.value,
            d_hat: dist.value,
            excluded_components: kappa.excluded,
            reheal_edges,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FailureTrace {
    pub initial: EntanglementTopology,
    pub failed_nodes: Vec<usize>,
    /// `steps[k]` is the state after `k` failures.
    pub steps: Vec<StepRecord>,
}

#[derive(Serialize)]
struct StepSummary {
    failures: usize,
    failed_node: Option<usize>,
    component_sizes: Vec<usize>,
    kappa_hat: f64,
    d_hat: f64,
    excluded_components: usize,
    reheal_edges: usize,
}

impl FailureTrace {
    /// JSON with per-step component sizes and metrics.
    pub fn to_json(&self) -> Result<String> {
        let steps: Vec<StepSummary> = self
            .steps
            .iter()
            .enumerate()
            .map(|(k, s)| StepSummary {
                failures: k,
                failed_node: s.failed_node,
                component_sizes: s.components.sizes(),
                kappa_hat: s.kappa_hat,
                d_hat: s.d_hat,
                excluded_components: s.excluded_components,
                reheal_edges: s.reheal_edges,
            })
            .collect();
        let doc = serde_json::json!({
            "failed_nodes": self.failed_nodes,
            "steps": steps,
        });
        Ok(serde_json::to_string_pretty(&doc)?)
    }
}

/// Fails `k_failures` distinct nodes drawn uniformly (seeded) from the
/// nodes that have not failed yet, recording metrics after every step.
pub fn run_failure_sequence(
    t: &EntanglementTopology,
    k_failures: usize,
    seed: u64,
    reheal_enabled: bool,
) -> Result<FailureTrace> {
    let mut candidates: Vec<usize> = (0..t.node_count()).filter(|&c| !t.is_failed(c)).collect();
    if k_failures >= candidates.len() {
        return Err(Error::invalid(format!(
            "{k_failures} failures requested but only {} nodes survive",
            candidates.len()
        )));
    }
    let mut rng = seeded_rng(seed);
    candidates.shuffle(&mut rng);
    candidates.truncate(k_failures);

    let heal = |topo: EntanglementTopology| {
        if reheal_enabled {
            reheal(&topo)
        } else {
            (topo, 0)
        }
    };
    let (mut current, edges) = heal(t.clone());
    let mut steps = vec![StepRecord::measure(&current, None, edges)];
    for &c in &candidates {
        let (next, edges) = heal(fail_node(&current, c)?);
        steps.push(StepRecord::measure(&next, Some(c), edges));
        current = next;
    }
    Ok(FailureTrace {
        initial: t.clone(),
        failed_nodes: candidates,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::Coloring;

    fn snake6(decorated: bool) -> EntanglementTopology {
        EntanglementTopology::build_snake(
            6,
            3,
            decorated,
            Coloring::new(vec![0, 0, 1, 1, 2, 2], 3).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn undecorated_failure_consumes_neighbours() {
        let t = fail_node(&snake6(false), 1).unwrap();
        let g = t.connectivity();
        assert_eq!(g.live_vertices().collect::<Vec<_>>(), vec![0, 5]);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.connected_components().len(), 2);
    }

    #[test]
    fn decorated_failure_keeps_neighbours() {
        let t = fail_node(&snake6(true), 1).unwrap();
        let g = t.connectivity();
        assert_eq!(
            g.connected_components().components,
            vec![vec![0, 1], vec![4, 5]]
        );
        assert!(g.has_edge(0, 1) && g.has_edge(4, 5));
    }

    #[test]
    fn fail_errors_and_only_node() {
        let t = snake6(true);
        assert!(fail_node(&t, 3).is_err());
        let once = fail_node(&t, 0).unwrap();
        assert!(fail_node(&once, 0).is_err());

        let solo =
            EntanglementTopology::build_snake(3, 1, true, Coloring::new(vec![0; 3], 1).unwrap())
                .unwrap();
        assert_eq!(fail_node(&solo, 0).unwrap().connectivity().live_count(), 0);
    }

    #[test]
    fn reheal_merges_shared_node() {
        // 0-1-2 | 3-4 with node 1 at vertices 1 and 3.
        let g = LabeledGraph::from_edges(5, &[(0, 1), (1, 2), (3, 4)]).unwrap();
        let t =
            EntanglementTopology::new(g, Coloring::new(vec![0, 1, 2, 1, 3], 4).unwrap(), 1, true)
                .unwrap();
        let (healed, added) = reheal(&t);
        assert_eq!(added, 1);
        assert!(healed.connectivity().has_edge(1, 3));
        assert_eq!(healed.connectivity().connected_components().len(), 1);
    }

    #[test]
    fn reheal_noop_when_classes_local() {
        let t = snake6(true);
        let (healed, added) = reheal(&t);
        assert_eq!(added, 0);
        assert_eq!(healed, t);
    }

    #[test]
    fn reheal_three_components() {
        let g = LabeledGraph::from_edges(6, &[(0, 1), (2, 3), (4, 5)]).unwrap();
        let t = EntanglementTopology::new(
            g,
            Coloring::new(vec![0, 1, 0, 2, 0, 3], 4).unwrap(),
            1,
            true,
        )
        .unwrap();
        let (healed, added) = reheal(&t);
        assert_eq!(added, 2);
        assert!(healed.connectivity().has_edge(0, 2));
        assert!(healed.connectivity().has_edge(0, 4));
        assert_eq!(healed.connectivity().connected_components().len(), 1);
    }

    #[test]
    fn hat_metrics_whole_topology() {
        let t = EntanglementTopology::build_lattice(4, 5, 1, true, Coloring::identity(20)).unwrap();
        assert_eq!(d_hat(&t).value, 7.0);
        assert_eq!(kappa_hat(&t).value, t.kappa_bar().unwrap());
        assert_eq!(kappa_hat(&t).qualifying, 1);
    }

    #[test]
    fn hat_metrics_average_components() {
        // path of 4 (diameter 3) and path of 6 (diameter 5), bijective.
        let g = LabeledGraph::from_edges(
            10,
            &[
                (0, 1),
                (1, 2),
                (2, 3),
                (4, 5),
                (5, 6),
                (6, 7),
                (7, 8),
                (8, 9),
            ],
        )
        .unwrap();
        let t = EntanglementTopology::new(g, Coloring::identity(10), 1, true).unwrap();
        assert_eq!(d_hat(&t).value, 4.0);

        // κ̄ = 2 on a 4-cycle of two 2-vertex classes, κ̄ = 1 on an edge.
        let g = LabeledGraph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 0), (4, 5)]).unwrap();
        let t = EntanglementTopology::new(
            g,
            Coloring::new(vec![0, 0, 1, 1, 2, 3], 4).unwrap(),
            1,
            true,
        )
        .unwrap();
        let k = kappa_hat(&t);
        assert_eq!(k.value, 1.5);
        assert_eq!(k.qualifying, 2);
        assert_eq!(k.excluded, 0);
    }

    #[test]
    fn hat_metrics_no_qualifying_component() {
        let g = LabeledGraph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let t = EntanglementTopology::new(g, Coloring::new(vec![0, 0, 1, 1], 2).unwrap(), 1, true)
            .unwrap();
        let k = kappa_hat(&t);
        assert_eq!((k.value, k.qualifying, k.excluded), (0.0, 0, 2));
        let d = d_hat(&t);
        assert_eq!((d.value, d.excluded), (0.0, 2));
    }

    #[test]
    fn sequence_zero_failures_is_intact() {
        let t = EntanglementTopology::build_lattice(4, 5, 1, true, Coloring::identity(20)).unwrap();
        let trace = run_failure_sequence(&t, 0, 1, true).unwrap();
        assert_eq!(trace.steps.len(), 1);
        assert_eq!(trace.steps[0].d_hat, 7.0);
        assert_eq!(trace.steps[0].kappa_hat, t.kappa_bar().unwrap());
    }

    #[test]
    fn sequence_is_seeded_and_distinct() {
        let colors: Vec<usize> = (0..36).map(|v| v % 8).collect();
        let t =
            EntanglementTopology::build_lattice(6, 6, 1, true, Coloring::new(colors, 8).unwrap())
                .unwrap();
        let a = run_failure_sequence(&t, 7, 99, true).unwrap();
        let b = run_failure_sequence(&t, 7, 99, true).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.steps.len(), 8);
        let mut nodes = a.failed_nodes.clone();
        nodes.sort_unstable();
        nodes.dedup();
        assert_eq!(nodes.len(), 7);
        let last = a.steps.last().unwrap();
        assert_eq!(last.kappa_hat, 0.0);
        assert!(run_failure_sequence(&t, 8, 1, true).is_err());
        let json = a.to_json().unwrap();
        assert!(json.contains("component_sizes"));
    }

    #[test]
    fn reheal_fixpoint_after_failures() {
        let colors: Vec<usize> = (0..49).map(|v| (v * 5) % 8).collect();
        let t =
            EntanglementTopology::build_lattice(7, 7, 1, false, Coloring::new(colors, 8).unwrap())
                .unwrap();
        let trace = run_failure_sequence(&t, 4, 3, true).unwrap();
        for step in &trace.steps {
            let labels = step.components.labels(49);
            for c in 0..8 {
                let comps: std::collections::BTreeSet<_> = t
                    .coloring()
                    .color_class(c)
                    .into_iter()
                    .filter_map(|v| labels[v])
                    .collect();
                assert!(comps.len() <= 1, "node {c} spans {comps:?}");
            }
        }
    }
}
