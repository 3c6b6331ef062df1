// SPDX-License-Identifier: Apache-2.0

//! Allocation strategies mapping logical vertices to network nodes.
//!
//! * clustered: contiguous row-major blocks, deterministic;
//! * random: i.i.d. uniform node per vertex, empty nodes allowed;
//! * optimized: simulated annealing on the min-max inter-node distance over
//!   class-size-preserving swaps.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::LabeledGraph;
use crate::topology::Coloring;

pub type Rng64 = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Optimized,
    Random,
    Clustered,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Optimized, Strategy::Random, Strategy::Clustered];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Optimized => "optimized",
            Strategy::Random => "random",
            Strategy::Clustered => "clustered",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown strategy `{s}`")))
    }
}

/// Simulated annealing schedule: `T ← cooling_rate · T` after every
/// proposal, no reheating, no early stop.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SaParams {
    pub initial_temperature: f64,
    pub cooling_rate: f64,
    pub iterations: usize,
}

impl Default for SaParams {
    fn default() -> Self {
        Self {
            initial_temperature: 10.0,
            cooling_rate: 0.99,
            iterations: 5000,
        }
    }
}

impl SaParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.initial_temperature > 0.0 && self.initial_temperature.is_finite()) {
            return Err(Error::invalid("initial temperature must be positive"));
        }
        if !(self.cooling_rate > 0.0 && self.cooling_rate < 1.0) {
            return Err(Error::invalid("cooling rate must lie in (0, 1)"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AllocationSpec {
    pub strategy: Strategy,
    pub node_count: usize,
    pub seed: u64,
    pub sa_params: Option<SaParams>,
}

impl AllocationSpec {
    pub fn allocate(&self, g: &LabeledGraph) -> Result<Coloring> {
        match self.strategy {
            Strategy::Clustered => allocate_clustered(g, self.node_count),
            Strategy::Random => allocate_random(g, self.node_count, self.seed),
            Strategy::Optimized => allocate_optimized(
                g,
                self.node_count,
                self.seed,
                self.sa_params.unwrap_or_default(),
            ),
        }
    }
}

/// Balanced class sizes: `⌊n/C⌋` or `⌈n/C⌉`, vertex `v` in block `v·C/n`.
fn block_colors(n: usize, node_count: usize) -> Vec<usize> {
    (0..n).map(|v| v * node_count / n).collect()
}

/// Contiguous blocks along the vertex order, which is row-major for
/// lattices built by [`LabeledGraph::grid`].
pub fn allocate_clustered(g: &LabeledGraph, node_count: usize) -> Result<Coloring> {
    let n = g.vertex_count();
    if node_count == 0 || node_count > n {
        return Err(Error::invalid(format!(
            "cannot split {n} vertices into {node_count} clustered blocks"
        )));
    }
    Coloring::new(block_colors(n, node_count), node_count)
}

pub fn allocate_random(g: &LabeledGraph, node_count: usize, seed: u64) -> Result<Coloring> {
    if node_count == 0 {
        return Err(Error::invalid("random allocation needs at least one node"));
    }
    let mut rng = seeded_rng(seed);
    let assignment = (0..g.vertex_count())
        .map(|_| rng.random_range(0..node_count))
        .collect();
    Coloring::new(assignment, node_count)
}

/// Outcome of one annealing run.
#[derive(Clone, Debug)]
pub struct AnnealReport {
    pub coloring: Coloring,
    /// `(max_c 𝒟_c, Σ_c 𝒟_c)` of the random balanced start.
    pub initial: (usize, usize),
    pub best: (usize, usize),
    pub accepted: usize,
}

pub fn allocate_optimized(
    g: &LabeledGraph,
    node_count: usize,
    seed: u64,
    params: SaParams,
) -> Result<Coloring> {
    anneal(g, node_count, seed, params).map(|r| r.coloring)
}

/// Simulated annealing over balanced colorings.
///
/// Starts from a seeded shuffle of balanced blocks and proposes swaps of
/// two vertices of different colors, so class sizes never change. A move
/// is accepted when the min-max objective does not grow, otherwise with
/// probability `exp(−Δ/T)`. The best coloring seen, ranked by
/// `(max 𝒟_c, Σ 𝒟_c)`, is returned.
pub fn anneal(
    g: &LabeledGraph,
    node_count: usize,
    seed: u64,
    params: SaParams,
) -> Result<AnnealReport> {
    params.validate()?;
    let n = g.vertex_count();
    if node_count == 0 || node_count > n {
        return Err(Error::invalid(format!(
            "cannot balance {n} vertices over {node_count} nodes"
        )));
    }
    if g.live_count() != n {
        return Err(Error::invalid("optimized allocation needs an intact graph"));
    }
    let mut rng = seeded_rng(seed);
    let mut colors = block_colors(n, node_count);
    colors.shuffle(&mut rng);

    let mut state = AnnealState::new(g, colors, node_count);
    let initial = state.energy();
    let mut current = initial;
    let mut best = initial;
    let mut best_colors = state.colors.clone();
    let mut accepted = 0;
    let mut temperature = params.initial_temperature;

    if node_count > 1 {
        for _ in 0..params.iterations {
            let u = rng.random_range(0..n);
            let v = loop {
                let v = rng.random_range(0..n);
                if state.colors[v] != state.colors[u] {
                    break v;
                }
            };
            let undo = state.swap(u, v);
            let next = state.energy();
            let delta = next.0 as f64 - current.0 as f64;
            let accept = delta <= 0.0 || rng.random::<f64>() < (-delta / temperature).exp();
            if accept {
                accepted += 1;
                current = next;
                if next < best {
                    best = next;
                    best_colors.clone_from(&state.colors);
                }
            } else {
                state.undo(undo);
            }
            temperature *= params.cooling_rate;
        }
    }

    Ok(AnnealReport {
        coloring: Coloring::new(best_colors, node_count)?,
        initial,
        best,
        accepted,
    })
}

const UNREACHABLE: u32 = u32::MAX;

/// Annealer working set: class membership plus the node distance matrix,
/// updated only for the two classes touched by a swap.
struct AnnealState {
    adjacency: Vec<Vec<usize>>,
    colors: Vec<usize>,
    members: Vec<Vec<usize>>,
    slot: Vec<usize>,
    /// `dist[c][c′] = d(c, c′)`, symmetric.
    dist: Vec<Vec<u32>>,
    scratch: Vec<u32>,
    queue: VecDeque<usize>,
}

struct Undo {
    u: usize,
    v: usize,
    rows: [(usize, Vec<u32>); 2],
}

impl AnnealState {
    fn new(g: &LabeledGraph, colors: Vec<usize>, node_count: usize) -> Self {
        let adjacency = (0..g.vertex_count())
            .map(|v| g.neighbors(v).collect())
            .collect();
        let mut members = vec![Vec::new(); node_count];
        let mut slot = vec![0; colors.len()];
        for (v, &c) in colors.iter().enumerate() {
            slot[v] = members[c].len();
            members[c].push(v);
        }
        let mut state = Self {
            adjacency,
            colors,
            members,
            slot,
            dist: vec![vec![0; node_count]; node_count],
            scratch: Vec::new(),
            queue: VecDeque::new(),
        };
        for c in 0..node_count {
            state.refresh_row(c);
        }
        state
    }

    fn refresh_row(&mut self, c: usize) {
        let n = self.colors.len();
        self.scratch.clear();
        self.scratch.resize(n, UNREACHABLE);
        for &s in &self.members[c] {
            self.scratch[s] = 0;
            self.queue.push_back(s);
        }
        while let Some(u) = self.queue.pop_front() {
            let next = self.scratch[u] + 1;
            for &w in &self.adjacency[u] {
                if self.scratch[w] == UNREACHABLE {
                    self.scratch[w] = next;
                    self.queue.push_back(w);
                }
            }
        }
        for other in 0..self.members.len() {
            let d = if other == c {
                0
            } else {
                self.members[other]
                    .iter()
                    .map(|&v| self.scratch[v])
                    .min()
                    .unwrap_or(UNREACHABLE)
            };
            self.dist[c][other] = d;
            self.dist[other][c] = d;
        }
    }

    fn swap(&mut self, u: usize, v: usize) -> Undo {
        let (a, b) = (self.colors[u], self.colors[v]);
        let rows = [(a, self.dist[a].clone()), (b, self.dist[b].clone())];
        self.exchange(u, v);
        self.refresh_row(a);
        self.refresh_row(b);
        Undo { u, v, rows }
    }

    fn undo(&mut self, undo: Undo) {
        self.exchange(undo.u, undo.v);
        for (c, row) in undo.rows {
            for (other, &d) in row.iter().enumerate() {
                self.dist[other][c] = d;
            }
            self.dist[c] = row;
        }
    }

    fn exchange(&mut self, u: usize, v: usize) {
        let (a, b) = (self.colors[u], self.colors[v]);
        self.members[a][self.slot[u]] = v;
        self.members[b][self.slot[v]] = u;
        self.slot.swap(u, v);
        self.colors.swap(u, v);
    }

    /// `(max_c 𝒟_c, Σ_c 𝒟_c)` with unreachable pairs left out.
    fn energy(&self) -> (usize, usize) {
        let mut minmax = 0;
        let mut sum = 0;
        for row in &self.dist {
            let worst = row
                .iter()
                .copied()
                .filter(|&d| d != UNREACHABLE)
                .max()
                .unwrap_or(0) as usize;
            minmax = minmax.max(worst);
            sum += worst;
        }
        (minmax, sum)
    }
}
