// SPDX-License-Identifier: Apache-2.0

//! Entanglement topologies: a connectivity graph of logical vertices plus a
//! coloring that assigns each logical vertex to a network node.
//!
//! Decorations change only the memory accounting (`μ` → `3μ` physical qubits
//! per logical vertex) and the failure semantics; the connectivity graph is
//! the same with or without them.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::LabeledGraph;

/// Physical qubits per logical vertex added by decoration.
pub const DECORATION_FACTOR: usize = 3;

/// Qubits per pre-shared Bell pair in the all-to-all baseline
/// (two decorated endpoints of three qubits each).
pub const ALL_TO_ALL_QUBITS_PER_PAIR: usize = 6;

/// Total map from vertex id to node id in `0..node_count`. Nodes may own
/// no vertex at all.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    assignment: Vec<usize>,
    node_count: usize,
}

impl Coloring {
    pub fn new(assignment: Vec<usize>, node_count: usize) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::invalid("a coloring needs at least one node"));
        }
        if let Some((v, &c)) = assignment
            .iter()
            .enumerate()
            .find(|(_, &c)| c >= node_count)
        {
            return Err(Error::invalid(format!(
                "vertex {v} colored {c}, but only {node_count} nodes exist"
            )));
        }
        Ok(Self {
            assignment,
            node_count,
        })
    }

    /// Every vertex on its own node: `f(v) = v`.
    pub fn identity(n: usize) -> Self {
        Self {
            assignment: (0..n).collect(),
            node_count: n.max(1),
        }
    }

    pub fn node_of(&self, v: usize) -> usize {
        self.assignment[v]
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// S_c over all assigned vertices.
    pub fn color_class(&self, c: usize) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter_map(|(v, &f)| (f == c).then_some(v))
            .collect()
    }

    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut classes = vec![Vec::new(); self.node_count];
        for (v, &c) in self.assignment.iter().enumerate() {
            classes[c].push(v);
        }
        classes
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.node_count];
        for &c in &self.assignment {
            sizes[c] += 1;
        }
        sizes
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryReport {
    /// Physical qubits stored at each node, indexed by node id.
    pub per_node: Vec<usize>,
    pub max_per_node: usize,
    pub total: usize,
}

impl MemoryReport {
    fn from_per_node(per_node: Vec<usize>) -> Self {
        Self {
            max_per_node: per_node.iter().copied().max().unwrap_or(0),
            total: per_node.iter().sum(),
            per_node,
        }
    }
}

/// Memory of the all-to-all baseline: one decorated Bell pair per
/// unordered node pair, `3·C·(C−1)` qubits in total.
pub fn all_to_all_memory(node_count: usize) -> Result<MemoryReport> {
    if node_count < 2 {
        return Err(Error::invalid(format!(
            "all-to-all baseline needs at least 2 nodes, got {node_count}"
        )));
    }
    let per_node = ALL_TO_ALL_QUBITS_PER_PAIR / 2 * (node_count - 1);
    Ok(MemoryReport::from_per_node(vec![per_node; node_count]))
}

/// Worst inter-node distance of one node. Unreachable partners are left out
/// of the maximum and counted instead.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WorstDistance {
    pub hops: usize,
    pub unreachable: usize,
}

/// Aggregate view of the min-max objective.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ObjectiveSummary {
    /// `max_c 𝒟_c` over nonempty classes.
    pub minmax: usize,
    /// `Σ_c 𝒟_c`, the secondary key used by the annealer.
    pub sum_worst: usize,
    pub empty_classes: usize,
    pub unreachable_pairs: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntanglementTopology {
    connectivity: LabeledGraph,
    coloring: Coloring,
    mu: usize,
    decorated: bool,
    lattice_dims: Option<(usize, usize)>,
    failed: BTreeSet<usize>,
}

impl EntanglementTopology {
    /// Generic constructor over an arbitrary connectivity graph.
    pub fn new(
        connectivity: LabeledGraph,
        coloring: Coloring,
        mu: usize,
        decorated: bool,
    ) -> Result<Self> {
        if mu == 0 {
            return Err(Error::invalid("parallelism factor must be positive"));
        }
        if coloring.len() != connectivity.vertex_count() {
            return Err(Error::invalid(format!(
                "coloring covers {} vertices, connectivity graph has {}",
                coloring.len(),
                connectivity.vertex_count()
            )));
        }
        Ok(Self {
            connectivity,
            coloring,
            mu,
            decorated,
            lattice_dims: None,
            failed: BTreeSet::new(),
        })
    }

    /// Snake topology: a path of `n_logical` logical vertices, each backed by
    /// `μ` parallel linear clusters.
    pub fn build_snake(
        n_logical: usize,
        mu: usize,
        decorated: bool,
        coloring: Coloring,
    ) -> Result<Self> {
        Self::build_lattice(1, n_logical, mu, decorated, coloring)
    }

    /// `m_logical × n_logical` lattice topology.
    pub fn build_lattice(
        m_logical: usize,
        n_logical: usize,
        mu: usize,
        decorated: bool,
        coloring: Coloring,
    ) -> Result<Self> {
        if m_logical == 0 || n_logical == 0 {
            return Err(Error::invalid(format!(
                "lattice dimensions must be positive, got {m_logical}x{n_logical}"
            )));
        }
        let mut t = Self::new(
            LabeledGraph::grid(m_logical, n_logical),
            coloring,
            mu,
            decorated,
        )?;
        t.lattice_dims = Some((m_logical, n_logical));
        Ok(t)
    }

    pub fn connectivity(&self) -> &LabeledGraph {
        &self.connectivity
    }

    pub fn coloring(&self) -> &Coloring {
        &self.coloring
    }

    pub fn mu(&self) -> usize {
        self.mu
    }

    pub fn decorated(&self) -> bool {
        self.decorated
    }

    pub fn lattice_dims(&self) -> Option<(usize, usize)> {
        self.lattice_dims
    }

    pub fn node_count(&self) -> usize {
        self.coloring.node_count()
    }

    pub fn failed_nodes(&self) -> &BTreeSet<usize> {
        &self.failed
    }

    pub fn is_failed(&self, c: usize) -> bool {
        self.failed.contains(&c)
    }

    pub(crate) fn parts_mut(&mut self) -> (&mut LabeledGraph, &mut BTreeSet<usize>) {
        (&mut self.connectivity, &mut self.failed)
    }

    /// Live members of S_c.
    pub fn color_class(&self, c: usize) -> Vec<usize> {
        self.coloring
            .color_class(c)
            .into_iter()
            .filter(|&v| self.connectivity.is_live(v))
            .collect()
    }

    /// Live color classes, indexed by node id.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut classes = vec![Vec::new(); self.node_count()];
        for v in self.connectivity.live_vertices() {
            classes[self.coloring.node_of(v)].push(v);
        }
        classes
    }

    fn nonempty_class(&self, c: usize) -> Result<Vec<usize>> {
        if c >= self.node_count() {
            return Err(Error::invalid(format!("unknown node {c}")));
        }
        let class = self.color_class(c);
        if class.is_empty() {
            return Err(Error::EmptyClass(c));
        }
        Ok(class)
    }

    fn distinct_pair(&self, c: usize, c2: usize) -> Result<(Vec<usize>, Vec<usize>)> {
        if c == c2 {
            return Err(Error::invalid(format!(
                "inter-node metric needs two distinct nodes, got {c} twice"
            )));
        }
        Ok((self.nonempty_class(c)?, self.nonempty_class(c2)?))
    }

    /// d(c, c′): minimum hop distance between the two classes.
    pub fn inter_node_distance(&self, c: usize, c2: usize) -> Result<Option<usize>> {
        let (from, to) = self.distinct_pair(c, c2)?;
        Ok(class_distance(&self.connectivity, &from, &to))
    }

    /// 𝒟_c: the largest d(c, c′) over the other nonempty classes.
    pub fn worst_inter_node_distance(&self, c: usize) -> Result<WorstDistance> {
        let own = self.nonempty_class(c)?;
        let dist = self.connectivity.bfs_distances(&own);
        let mut others = 0;
        let mut worst = WorstDistance {
            hops: 0,
            unreachable: 0,
        };
        for (c2, class) in self.classes().iter().enumerate() {
            if c2 == c || class.is_empty() {
                continue;
            }
            others += 1;
            match class.iter().filter_map(|&v| dist[v]).min() {
                Some(d) => worst.hops = worst.hops.max(d),
                None => worst.unreachable += 1,
            }
        }
        if others == 0 {
            return Err(Error::DegenerateTopology(format!(
                "node {c} has no other nonempty node to measure against"
            )));
        }
        Ok(worst)
    }

    pub fn objective_summary(&self) -> Result<ObjectiveSummary> {
        objective_summary(&self.connectivity, &self.classes())
    }

    /// `max_c 𝒟_c`, the quantity minimised by the optimized allocation.
    pub fn minmax_objective(&self) -> Result<usize> {
        self.objective_summary().map(|s| s.minmax)
    }

    /// κ(c, c′) via the support graph with virtual terminals on both classes.
    pub fn kappa_inter_node(&self, c: usize, c2: usize) -> Result<usize> {
        let (a, b) = self.distinct_pair(c, c2)?;
        Ok(class_kappa(&self.connectivity, &a, &b))
    }

    /// κ̄: mean κ over unordered pairs of nonempty classes.
    pub fn kappa_bar(&self) -> Result<f64> {
        mean_kappa(&self.connectivity, &self.classes())
            .ok_or_else(|| Error::DegenerateTopology("fewer than two nonempty nodes".into()))
    }

    /// Qubits held per node: `μ·|S_c|`, tripled when decorated.
    pub fn memory_report(&self) -> MemoryReport {
        let factor = if self.decorated { DECORATION_FACTOR } else { 1 } * self.mu;
        let per_node = self.classes().iter().map(|s| factor * s.len()).collect();
        MemoryReport::from_per_node(per_node)
    }

    pub fn to_document(&self) -> TopologyDocument {
        TopologyDocument {
            dims: self.lattice_dims.map(|(m, n)| [m, n]),
            mu: self.mu,
            decorated: self.decorated,
            edges: self.connectivity.edges().map(|(u, v)| [u, v]).collect(),
            coloring: self.coloring.assignment().to_vec(),
            node_count: self.node_count(),
        }
    }

    pub fn from_document(doc: &TopologyDocument) -> Result<Self> {
        let coloring = Coloring::new(doc.coloring.clone(), doc.node_count)?;
        let n = coloring.len();
        let mut graph = LabeledGraph::new(n);
        for &[u, v] in &doc.edges {
            graph.add_edge(u, v)?;
        }
        let mut t = Self::new(graph, coloring, doc.mu, doc.decorated)?;
        if let Some([m, cols]) = doc.dims {
            if m * cols != n {
                return Err(Error::invalid(format!(
                    "dims {m}x{cols} do not match {n} colored vertices"
                )));
            }
            t.lattice_dims = Some((m, cols));
        }
        Ok(t)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_document(&serde_json::from_str(text)?)
    }
}

/// JSON form of a topology.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologyDocument {
    pub dims: Option<[usize; 2]>,
    pub mu: usize,
    pub decorated: bool,
    pub edges: Vec<[usize; 2]>,
    pub coloring: Vec<usize>,
    pub node_count: usize,
}

pub(crate) fn class_distance(g: &LabeledGraph, from: &[usize], to: &[usize]) -> Option<usize> {
    let dist = g.bfs_distances(from);
    to.iter().filter_map(|&v| dist[v]).min()
}

/// Min-max summary over the nonempty entries of `classes`.
pub(crate) fn objective_summary(
    g: &LabeledGraph,
    classes: &[Vec<usize>],
) -> Result<ObjectiveSummary> {
    let present: Vec<&Vec<usize>> = classes.iter().filter(|s| !s.is_empty()).collect();
    if present.len() < 2 {
        return Err(Error::DegenerateTopology(
            "fewer than two nonempty nodes".into(),
        ));
    }
    let mut summary = ObjectiveSummary {
        minmax: 0,
        sum_worst: 0,
        empty_classes: classes.len() - present.len(),
        unreachable_pairs: 0,
    };
    for (i, from) in present.iter().enumerate() {
        let dist = g.bfs_distances(from);
        let mut worst = 0;
        for (j, to) in present.iter().enumerate() {
            if i == j {
                continue;
            }
            match to.iter().filter_map(|&v| dist[v]).min() {
                Some(d) => worst = worst.max(d),
                None if i < j => summary.unreachable_pairs += 1,
                None => {}
            }
        }
        summary.minmax = summary.minmax.max(worst);
        summary.sum_worst += worst;
    }
    Ok(summary)
}

/// κ between two vertex sets via the support graph.
pub(crate) fn class_kappa(g: &LabeledGraph, a: &[usize], b: &[usize]) -> usize {
    let mut support = g.clone();
    let s = support.add_vertex();
    let t = support.add_vertex();
    for &v in a {
        support.add_edge(s, v).expect("class members are live");
    }
    for &v in b {
        support.add_edge(t, v).expect("class members are live");
    }
    support
        .max_vertex_disjoint_paths(s, t)
        .expect("virtual terminals are live and distinct")
}

/// κ̄ over the nonempty entries of `classes`; `None` with fewer than two.
pub(crate) fn mean_kappa(g: &LabeledGraph, classes: &[Vec<usize>]) -> Option<f64> {
    let present: Vec<&Vec<usize>> = classes.iter().filter(|s| !s.is_empty()).collect();
    let k = present.len();
    if k < 2 {
        return None;
    }
    let mut total = 0usize;
    for i in 0..k {
        for j in i + 1..k {
            total += class_kappa(g, present[i], present[j]);
        }
    }
    Some(2.0 * total as f64 / (k * (k - 1)) as f64)
}
