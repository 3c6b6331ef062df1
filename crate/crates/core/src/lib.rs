// SPDX-License-Identifier: Apache-2.0

//! Flexible qubit allocation for lattice-shaped network resource states.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`]: undirected graphs with a liveness mask, BFS distances,
//!   connected components and vertex-disjoint path counts.
//! * [`graph_state`]: graph-state rewrites (local complementation, Pauli
//!   measurements, Bell extraction) and a dense statevector oracle.
//! * [`topology`]: colored connectivity graphs, memory accounting and the
//!   inter-node metrics used by the allocator and the failure simulator.
//! * [`allocation`]: clustered, random and annealed allocation strategies.
//! * [`failure`]: nested node failures, re-healing and per-component metrics.
//! * [`experiments`]: seeded batch experiments emitting CSV tables.

pub mod allocation;
pub mod error;
pub mod experiments;
pub mod failure;
pub mod graph;
pub mod graph_state;
pub mod statevector;
pub mod topology;

mod flow;

pub use error::{Error, Result};
pub use graph::{ComponentPartition, LabeledGraph};
pub use graph_state::{Basis, GraphState, MeasurementOutcomeGraph};
pub use topology::{Coloring, EntanglementTopology, MemoryReport};
