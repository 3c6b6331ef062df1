// SPDX-License-Identifier: Apache-2.0

//! Undirected simple graphs over dense integer vertex ids.
//!
//! Vertices are never reindexed: deleting a vertex clears its edges and
//! flips a liveness bit, so colorings and failure traces keep referring to
//! the original ids.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::FlowNetwork;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LabeledGraph {
    adjacency: Vec<BTreeSet<usize>>,
    alive: Vec<bool>,
    edge_count: usize,
}

/// Partition of the live vertices into maximal connected sets, ordered by
/// the smallest vertex id of each set.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentPartition {
    pub components: Vec<Vec<usize>>,
}

impl ComponentPartition {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> {
        self.components.iter().map(Vec::as_slice)
    }

    /// Component index for every vertex id below `vertex_count`; `None` for
    /// vertices not covered by the partition.
    pub fn labels(&self, vertex_count: usize) -> Vec<Option<usize>> {
        let mut labels = vec![None; vertex_count];
        for (i, comp) in self.components.iter().enumerate() {
            for &v in comp {
                labels[v] = Some(i);
            }
        }
        labels
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.components.iter().map(Vec::len).collect()
    }
}

impl LabeledGraph {
    /// Graph with `n` live, isolated vertices.
    pub fn new(n: usize) -> Self {
        Self {
            adjacency: vec![BTreeSet::new(); n],
            alive: vec![true; n],
            edge_count: 0,
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn path(n: usize) -> Self {
        Self::grid(1, n)
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Self::path(n);
        if n > 2 {
            g.insert_edge(n - 1, 0);
        }
        g
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.insert_edge(u, v);
            }
        }
        g
    }

    /// `rows × cols` nearest-neighbour lattice, vertex `r * cols + c`.
    pub fn grid(rows: usize, cols: usize) -> Self {
        let mut g = Self::new(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let v = r * cols + c;
                if c + 1 < cols {
                    g.insert_edge(v, v + 1);
                }
                if r + 1 < rows {
                    g.insert_edge(v, v + cols);
                }
            }
        }
        g
    }

    /// Total number of vertex ids, live or not.
    pub fn vertex_count(&self) -> usize {
        self.alive.len()
    }

    pub fn live_count(&self) -> usize {
        self.alive.iter().filter(|&&a| a).count()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_live(&self, v: usize) -> bool {
        self.alive.get(v).copied().unwrap_or(false)
    }

    pub fn live_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.alive
            .iter()
            .enumerate()
            .filter_map(|(v, &a)| a.then_some(v))
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if self.is_live(v) {
            Ok(())
        } else {
            Err(Error::InvalidVertex(v))
        }
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[v].iter().copied()
    }

    pub fn neighbor_set(&self, v: usize) -> &BTreeSet<usize> {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency.get(u).is_some_and(|n| n.contains(&v))
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, n)| n.range(u + 1..).map(move |&v| (u, v)))
    }

    /// Appends a fresh live vertex and returns its id.
    pub fn add_vertex(&mut self) -> usize {
        self.adjacency.push(BTreeSet::new());
        self.alive.push(true);
        self.alive.len() - 1
    }

    /// Adds `{u, v}`. Returns `false` if the edge was already present.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<bool> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(Error::invalid(format!("self-loop on vertex {u}")));
        }
        Ok(self.insert_edge(u, v))
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        if u >= self.vertex_count() || !self.adjacency[u].remove(&v) {
            return false;
        }
        self.adjacency[v].remove(&u);
        self.edge_count -= 1;
        true
    }

    pub(crate) fn toggle_edge(&mut self, u: usize, v: usize) {
        if !self.remove_edge(u, v) {
            self.insert_edge(u, v);
        }
    }

    fn insert_edge(&mut self, u: usize, v: usize) -> bool {
        debug_assert!(u != v && self.alive[u] && self.alive[v]);
        if self.adjacency[u].insert(v) {
            self.adjacency[v].insert(u);
            self.edge_count += 1;
            true
        } else {
            false
        }
    }

    /// Deletes `v` and all incident edges. The id stays allocated.
    pub fn remove_vertex(&mut self, v: usize) -> Result<()> {
        self.check_vertex(v)?;
        let nbrs = std::mem::take(&mut self.adjacency[v]);
        for u in &nbrs {
            self.adjacency[*u].remove(&v);
        }
        self.edge_count -= nbrs.len();
        self.alive[v] = false;
        Ok(())
    }

    /// Hop distances from the nearest of `sources` to every vertex; `None`
    /// for unreachable or dead vertices. Dead sources are ignored.
    pub fn bfs_distances(&self, sources: &[usize]) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertex_count()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if self.is_live(s) && dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let next = dist[u].map(|d| d + 1);
            for &w in &self.adjacency[u] {
                if dist[w].is_none() {
                    dist[w] = next;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Hop count of a shortest `u`–`v` path, `None` when unreachable.
    pub fn shortest_path_distance(&self, u: usize, v: usize) -> Result<Option<usize>> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Ok(Some(0));
        }
        Ok(self.bfs_distances(&[u])[v])
    }

    pub fn connected_components(&self) -> ComponentPartition {
        let mut seen = vec![false; self.vertex_count()];
        let mut components = Vec::new();
        for root in self.live_vertices() {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut comp = vec![root];
            let mut head = 0;
            while head < comp.len() {
                let u = comp[head];
                head += 1;
                for &w in &self.adjacency[u] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            components.push(comp);
        }
        ComponentPartition { components }
    }

    /// Maximum number of `s`–`t` paths that pairwise share no internal
    /// vertex (local vertex connectivity). A direct edge counts as one path.
    pub fn max_vertex_disjoint_paths(&self, s: usize, t: usize) -> Result<usize> {
        self.check_vertex(s)?;
        self.check_vertex(t)?;
        if s == t {
            return Err(Error::invalid("source and target coincide"));
        }
        // vertex v -> in-half 2v, out-half 2v+1
        let n = self.vertex_count();
        let mut net = FlowNetwork::new(2 * n);
        for v in self.live_vertices() {
            if v != s && v != t {
                net.add_arc(2 * v, 2 * v + 1, 1);
            }
        }
        for (u, v) in self.edges() {
            net.add_arc(2 * u + 1, 2 * v, 1);
            net.add_arc(2 * v + 1, 2 * u, 1);
        }
        Ok(net.max_flow(2 * s + 1, 2 * t) as usize)
    }

    /// Eccentricity-based diameter over reachable pairs of live vertices.
    pub fn diameter(&self) -> usize {
        self.live_vertices()
            .map(|v| {
                self.bfs_distances(&[v])
                    .into_iter()
                    .flatten()
                    .max()
                    .unwrap_or(0)
            })
            .max()
            .unwrap_or(0)
    }

    /// Edge-list text: header `n <vertex_count>` then one `u v` per line.
    /// Liveness is not encoded; every id below `n` is live on import.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("n {}\n", self.vertex_count());
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "missing `n <vertex_count>` header".into(),
        })?;
        let n = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["n", count] => count.parse::<usize>().map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?,
            _ => {
                return Err(Error::Parse {
                    line,
                    message: format!("expected `n <vertex_count>`, found `{header}`"),
                })
            }
        };
        let mut g = Self::new(n);
        for (line, l) in lines {
            let parts: Vec<_> = l.split_whitespace().collect();
            let parse = |s: &str| {
                s.parse::<usize>().map_err(|e| Error::Parse {
                    line,
                    message: e.to_string(),
                })
            };
            let [u, v] = parts.as_slice() else {
                return Err(Error::Parse {
                    line,
                    message: format!("expected `u v`, found `{l}`"),
                });
            };
            let (u, v) = (parse(u)?, parse(v)?);
            g.add_edge(u, v).map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?;
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_triangles() -> LabeledGraph {
        LabeledGraph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap()
    }

    #[test]
    fn path_distance() {
        let g = LabeledGraph::path(4);
        assert_eq!(g.shortest_path_distance(0, 3).unwrap(), Some(3));
        assert_eq!(g.shortest_path_distance(2, 2).unwrap(), Some(0));
    }

    #[test]
    fn grid_corner_distance() {
        let g = LabeledGraph::grid(4, 5);
        assert_eq!(g.shortest_path_distance(0, 19).unwrap(), Some(7));
        assert_eq!(g.diameter(), 7);
    }

    #[test]
    fn unreachable_is_none() {
        let g = two_triangles();
        assert_eq!(g.shortest_path_distance(0, 4).unwrap(), None);
    }

    #[test]
    fn dead_vertex_rejected() {
        let mut g = LabeledGraph::path(3);
        g.remove_vertex(1).unwrap();
        assert!(matches!(
            g.shortest_path_distance(0, 1),
            Err(Error::InvalidVertex(1))
        ));
        assert!(matches!(
            g.shortest_path_distance(0, 9),
            Err(Error::InvalidVertex(9))
        ));
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.live_count(), 2);
    }

    #[test]
    fn components() {
        assert!(LabeledGraph::new(0).connected_components().is_empty());
        let g = LabeledGraph::from_edges(4, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(
            g.connected_components().components,
            vec![vec![0, 1, 2], vec![3]]
        );
        let grid = LabeledGraph::grid(2, 3);
        assert_eq!(grid.connected_components().sizes(), vec![6]);
    }

    #[test]
    fn components_skip_dead() {
        let mut g = LabeledGraph::path(5);
        g.remove_vertex(2).unwrap();
        assert_eq!(
            g.connected_components().components,
            vec![vec![0, 1], vec![3, 4]]
        );
    }

    #[test]
    fn kappa_simple_cases() {
        assert_eq!(
            LabeledGraph::complete(4)
                .max_vertex_disjoint_paths(0, 1)
                .unwrap(),
            3
        );
        assert_eq!(
            LabeledGraph::cycle(6)
                .max_vertex_disjoint_paths(0, 3)
                .unwrap(),
            2
        );
        assert_eq!(two_triangles().max_vertex_disjoint_paths(0, 3).unwrap(), 0);
        assert_eq!(
            LabeledGraph::path(2)
                .max_vertex_disjoint_paths(0, 1)
                .unwrap(),
            1
        );
    }

    #[test]
    fn kappa_errors() {
        let g = LabeledGraph::path(3);
        assert!(matches!(
            g.max_vertex_disjoint_paths(1, 1),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            g.max_vertex_disjoint_paths(0, 5),
            Err(Error::InvalidVertex(5))
        ));
    }

    #[test]
    fn self_loop_rejected() {
        let mut g = LabeledGraph::new(2);
        assert!(g.add_edge(1, 1).is_err());
        assert!(g.add_edge(0, 1).unwrap());
        assert!(!g.add_edge(1, 0).unwrap());
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn edge_list_roundtrip() {
        let g = LabeledGraph::grid(3, 3);
        let text = g.to_edge_list();
        assert!(text.starts_with("n 9\n"));
        assert_eq!(LabeledGraph::parse_edge_list(&text).unwrap(), g);
    }

    #[test]
    fn edge_list_errors() {
        assert!(LabeledGraph::parse_edge_list("").is_err());
        assert!(LabeledGraph::parse_edge_list("vertices 3\n").is_err());
        let err = LabeledGraph::parse_edge_list("n 3\n0 1\n1 7\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }
}
