// SPDX-License-Identifier: Apache-2.0

//! Graph states as adjacency graphs, with local complementation and the
//! single-qubit Pauli measurement rewrites.
//!
//! Only the `+1` outcome branch is modelled and local unitary corrections are
//! not tracked: every result is the stated graph state up to local unitaries.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::LabeledGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::X, Basis::Y, Basis::Z];
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Basis::X => "X",
            Basis::Y => "Y",
            Basis::Z => "Z",
        };
        f.write_str(s)
    }
}

/// The state stabilized by `X_a ∏_{b ∈ N(a)} Z_b` for every live qubit `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphState {
    graph: LabeledGraph,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasurementOutcomeGraph {
    pub result_graph: LabeledGraph,
    pub basis: Basis,
    pub measured_qubit: usize,
    /// Neighbour used by the X rule; `None` for Y/Z or an isolated qubit.
    pub special_neighbor: Option<usize>,
}

impl MeasurementOutcomeGraph {
    pub fn into_state(self) -> GraphState {
        GraphState::from_graph(self.result_graph)
    }
}

impl From<LabeledGraph> for GraphState {
    fn from(graph: LabeledGraph) -> Self {
        Self { graph }
    }
}

impl GraphState {
    pub fn from_graph(graph: LabeledGraph) -> Self {
        Self { graph }
    }

    /// 1D cluster: a path on `n` qubits.
    pub fn linear_cluster(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("linear cluster needs at least one qubit"));
        }
        Ok(Self::from_graph(LabeledGraph::path(n)))
    }

    /// 2D cluster: a `rows × cols` nearest-neighbour grid.
    pub fn lattice_cluster(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid(format!(
                "lattice dimensions must be positive, got {rows}x{cols}"
            )));
        }
        Ok(Self::from_graph(LabeledGraph::grid(rows, cols)))
    }

    pub fn graph(&self) -> &LabeledGraph {
        &self.graph
    }

    pub fn into_graph(self) -> LabeledGraph {
        self.graph
    }

    pub fn qubit_count(&self) -> usize {
        self.graph.live_count()
    }

    /// τ_a: complements the edge set among the neighbours of `a`.
    pub fn local_complement(&self, a: usize) -> Result<Self> {
        let mut graph = self.graph.clone();
        local_complement_in_place(&mut graph, a)?;
        Ok(Self { graph })
    }

    /// Pauli measurement of qubit `a`, `+1` branch.
    ///
    /// * Z: `G − a`
    /// * Y: `τ_a(G) − a`
    /// * X: `τ_b0(τ_a(τ_b0(G)) − a)` with `b0 ∈ N(a)`; the smallest-id
    ///   neighbour is used when `b0` is omitted.
    ///
    /// An isolated qubit is simply removed in every basis.
    pub fn measure_pauli(
        &self,
        a: usize,
        basis: Basis,
        b0: Option<usize>,
    ) -> Result<MeasurementOutcomeGraph> {
        self.graph.check_vertex(a)?;
        let mut g = self.graph.clone();
        let mut special_neighbor = None;
        match basis {
            Basis::Z => {}
            Basis::Y => local_complement_in_place(&mut g, a)?,
            Basis::X => {
                let first = self.graph.neighbors(a).next();
                let b0 = match (b0, first) {
                    (Some(b), _) if !self.graph.has_edge(a, b) => {
                        return Err(Error::invalid(format!(
                            "b0 = {b} is not a neighbour of qubit {a}"
                        )))
                    }
                    (Some(b), _) => Some(b),
                    (None, first) => first,
                };
                if let Some(b) = b0 {
                    local_complement_in_place(&mut g, b)?;
                    local_complement_in_place(&mut g, a)?;
                    g.remove_vertex(a)?;
                    local_complement_in_place(&mut g, b)?;
                    special_neighbor = Some(b);
                }
            }
        }
        if g.is_live(a) {
            g.remove_vertex(a)?;
        }
        Ok(MeasurementOutcomeGraph {
            result_graph: g,
            basis,
            measured_qubit: a,
            special_neighbor,
        })
    }

    /// Isolates `path` with Z measurements and consumes its interior with X
    /// measurements, leaving the two endpoints as an isolated entangled pair.
    pub fn extract_bell_along_path(&self, path: &[usize]) -> Result<GraphState> {
        self.extract_bell_with_record(path).map(|(state, _)| state)
    }

    /// As [`Self::extract_bell_along_path`], also returning every
    /// measurement performed, in order.
    ///
    /// Chords of `path` are short-cut first (the skipped vertices are
    /// Z-measured with the rest of the neighbourhood). Each interior vertex
    /// is then X-measured with `b0` set to the first endpoint, which is a
    /// leaf at that point, so every step contracts the path by one vertex.
    pub fn extract_bell_with_record(
        &self,
        path: &[usize],
    ) -> Result<(GraphState, Vec<MeasurementOutcomeGraph>)> {
        self.validate_path(path)?;
        let path = self.shortcut_chords(path);

        let on_path: std::collections::BTreeSet<usize> = path.iter().copied().collect();
        let outside: std::collections::BTreeSet<usize> = path
            .iter()
            .flat_map(|&v| self.graph.neighbors(v))
            .filter(|v| !on_path.contains(v))
            .collect();

        let mut state = self.clone();
        let mut record = Vec::new();
        for v in outside {
            let outcome = state.measure_pauli(v, Basis::Z, None)?;
            state = GraphState::from_graph(outcome.result_graph.clone());
            record.push(outcome);
        }
        let start = path[0];
        for &v in &path[1..path.len() - 1] {
            let outcome = state.measure_pauli(v, Basis::X, Some(start))?;
            state = GraphState::from_graph(outcome.result_graph.clone());
            record.push(outcome);
        }
        debug_assert!(state.graph.has_edge(start, path[path.len() - 1]));
        Ok((state, record))
    }

    fn validate_path(&self, path: &[usize]) -> Result<()> {
        if path.len() < 2 {
            return Err(Error::invalid("a Bell path needs at least two qubits"));
        }
        let mut seen = std::collections::BTreeSet::new();
        for &v in path {
            if !self.graph.is_live(v) {
                return Err(Error::invalid(format!("qubit {v} is not live")));
            }
            if !seen.insert(v) {
                return Err(Error::invalid(format!("qubit {v} repeats on the path")));
            }
        }
        if let Some(w) = path.windows(2).find(|w| !self.graph.has_edge(w[0], w[1])) {
            return Err(Error::invalid(format!(
                "no edge between consecutive path qubits {} and {}",
                w[0], w[1]
            )));
        }
        Ok(())
    }

    /// Greedy farthest-jump along the path; the result has no chords.
    fn shortcut_chords(&self, path: &[usize]) -> Vec<usize> {
        let mut out = vec![path[0]];
        let mut i = 0;
        while i + 1 < path.len() {
            let j = (i + 1..path.len())
                .rev()
                .find(|&j| self.graph.has_edge(path[i], path[j]))
                .expect("consecutive path vertices are adjacent");
            out.push(path[j]);
            i = j;
        }
        out
    }
}

pub(crate) fn local_complement_in_place(g: &mut LabeledGraph, a: usize) -> Result<()> {
    g.check_vertex(a)?;
    let nbrs: Vec<usize> = g.neighbors(a).collect();
    for (i, &u) in nbrs.iter().enumerate() {
        for &v in &nbrs[i + 1..] {
            g.toggle_edge(u, v);
        }
    }
    Ok(())
}
