// SPDX-License-Identifier: Apache-2.0

//! Seeded batch experiments over allocation strategies and failure
//! sequences, emitting [`ResultTable`]s.
//!
//! Trials run on a rayon pool; rows are collected in trial order, so the
//! data columns do not depend on the worker count.

mod config;
mod table;

use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::allocation::{anneal, seeded_rng, AllocationSpec, Strategy};
use crate::error::{Error, Result};
use crate::failure::run_failure_sequence;
use crate::graph::LabeledGraph;
use crate::graph_state::{Basis, GraphState};
use crate::statevector::statevector_oracle_check;
use crate::topology::{all_to_all_memory, EntanglementTopology, TopologyDocument};

pub use config::{Experiment, ExperimentConfig, FIG5_LATTICES};
pub use table::{mean_std, AggregateRow, ResultRow, ResultTable, RESULT_COLUMNS};

#[derive(Clone, Debug, Default)]
pub struct ExperimentOutput {
    pub table: ResultTable,
    /// Best topologies found by the `optimize` experiment.
    pub topologies: Vec<TopologyDocument>,
}

/// Seed of trial `i`.
pub fn trial_seed(base: u64, trial: usize) -> u64 {
    base.wrapping_add(trial as u64)
}

/// Independent stream for failure sampling, so it does not replay the
/// allocation stream of the same trial.
fn failure_seed(seed: u64) -> u64 {
    seed ^ 0x9e37_79b9_7f4a_7c15
}

fn millis(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Runs `f` on a pool of `workers` threads (all cores when `None`).
pub fn with_workers<T: Send>(
    workers: Option<usize>,
    f: impl FnOnce() -> Result<T> + Send,
) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        if w == 0 {
            return Err(Error::config("workers", "must be positive"));
        }
        builder = builder.num_threads(w);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::config("workers", e.to_string()))?;
    pool.install(f)
}

/// Runs `cfg` on a pool of `workers` threads (all cores when `None`).
pub fn run(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<ExperimentOutput> {
    cfg.validate()?;
    with_workers(workers, || match cfg.experiment {
        Experiment::StaticEval => run_static_eval(cfg).map(ExperimentOutput::from),
        Experiment::MemoryCompare => run_memory_compare(cfg).map(ExperimentOutput::from),
        Experiment::Resilience => run_resilience(cfg).map(ExperimentOutput::from),
        Experiment::Optimize => run_optimize(cfg),
        Experiment::GraphstateVerify => run_graphstate_verify(cfg).map(ExperimentOutput::from),
    })
}

impl From<ResultTable> for ExperimentOutput {
    fn from(table: ResultTable) -> Self {
        Self {
            table,
            topologies: Vec::new(),
        }
    }
}

fn base_row(cfg: &ExperimentConfig, dims: [usize; 2], strategy: &str, seed: u64) -> ResultRow {
    ResultRow {
        experiment: cfg.experiment.name().to_string(),
        rows: dims[0],
        cols: dims[1],
        node_count: cfg.node_count,
        strategy: strategy.to_string(),
        seed,
        failures: -1,
        objective: None,
        kappa: None,
        d_metric: None,
        qubits: None,
        excluded: 0,
        detail: String::new(),
        wall_time_ms: 0.0,
    }
}

fn allocate_lattice(
    cfg: &ExperimentConfig,
    [m, n]: [usize; 2],
    strategy: Strategy,
    node_count: usize,
    seed: u64,
) -> Result<EntanglementTopology> {
    let spec = AllocationSpec {
        strategy,
        node_count,
        seed,
        sa_params: Some(cfg.sa_params),
    };
    let coloring = spec.allocate(&LabeledGraph::grid(m, n))?;
    EntanglementTopology::build_lattice(m, n, cfg.mu, cfg.decorated, coloring)
}

fn cells(cfg: &ExperimentConfig) -> Vec<([usize; 2], Strategy, u64)> {
    let mut out = Vec::new();
    for &dims in &cfg.lattice_list {
        for &strategy in &cfg.strategies {
            for trial in 0..cfg.trials {
                out.push((dims, strategy, trial_seed(cfg.seed, trial)));
            }
        }
    }
    out
}

/// Min-max objective and κ̄ per lattice × strategy × trial.
pub fn run_static_eval(cfg: &ExperimentConfig) -> Result<ResultTable> {
    check_experiment(cfg, Experiment::StaticEval)?;
    let rows = cells(cfg)
        .into_par_iter()
        .map(|(dims, strategy, seed)| {
            let start = Instant::now();
            let t = allocate_lattice(cfg, dims, strategy, cfg.node_count, seed)?;
            let mut row = base_row(cfg, dims, strategy.name(), seed);
            match t.objective_summary() {
                Ok(s) => {
                    row.objective = Some(s.minmax as f64);
                    row.excluded = s.empty_classes;
                    row.kappa = t.kappa_bar().ok();
                    if s.unreachable_pairs > 0 {
                        row.detail = format!("unreachable_pairs={}", s.unreachable_pairs);
                    }
                }
                Err(Error::DegenerateTopology(_)) => {
                    row.excluded = t.classes().iter().filter(|c| c.is_empty()).count();
                    row.detail = "degenerate".into();
                }
                Err(e) => return Err(e),
            }
            row.qubits = Some(t.memory_report().total);
            row.wall_time_ms = millis(start);
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ResultTable::new(rows))
}

/// Most square `m × n = vertices` with `m ≤ n`.
fn near_square(vertices: usize) -> [usize; 2] {
    let m = (1..=vertices)
        .take_while(|m| m * m <= vertices)
        .filter(|&m| vertices.is_multiple_of(m))
        .last()
        .unwrap_or(1);
    [m, vertices / m]
}

/// Total qubits and κ̄ of the all-to-all baseline versus optimized snake
/// (|S_c| ≤ 2) and lattice (|S_c| ≥ 3) topologies.
pub fn run_memory_compare(cfg: &ExperimentConfig) -> Result<ResultTable> {
    check_experiment(cfg, Experiment::MemoryCompare)?;
    let mut tasks = Vec::new();
    for &c in &cfg.node_sweep {
        tasks.push((c, None, cfg.seed));
        for &k in &cfg.class_sizes {
            for trial in 0..cfg.trials {
                tasks.push((c, Some(k), trial_seed(cfg.seed, trial)));
            }
        }
    }
    let rows = tasks
        .into_par_iter()
        .map(|(c, class_size, seed)| {
            let start = Instant::now();
            let mut row = match class_size {
                None => {
                    let mut row = base_row(cfg, [0, 0], "all-to-all", seed);
                    row.qubits = Some(all_to_all_memory(c)?.total);
                    row.kappa = Some(1.0);
                    row
                }
                Some(k) => {
                    let dims = if k <= 2 {
                        [1, c * k]
                    } else {
                        near_square(c * k)
                    };
                    let t = allocate_lattice(cfg, dims, Strategy::Optimized, c, seed)?;
                    let mut row = base_row(cfg, dims, "optimized", seed);
                    row.qubits = Some(t.memory_report().total);
                    row.kappa = Some(t.kappa_bar()?);
                    row.objective = Some(t.minmax_objective()? as f64);
                    row.detail = format!(
                        "class_size={k};layout={}",
                        if dims[0] == 1 { "snake" } else { "lattice" }
                    );
                    row
                }
            };
            row.node_count = c;
            row.wall_time_ms = millis(start);
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ResultTable::new(rows))
}

/// κ̂ and 𝒟̂ after 0..=failures_max nested failures, per lattice ×
/// strategy × trial.
pub fn run_resilience(cfg: &ExperimentConfig) -> Result<ResultTable> {
    check_experiment(cfg, Experiment::Resilience)?;
    let k_max = cfg
        .failures_max
        .ok_or_else(|| Error::config("failures_max", "required for resilience"))?;
    let per_trial = cells(cfg)
        .into_par_iter()
        .map(|(dims, strategy, seed)| {
            let start = Instant::now();
            let t = allocate_lattice(cfg, dims, strategy, cfg.node_count, seed)?;
            let trace = run_failure_sequence(&t, k_max, failure_seed(seed), cfg.reheal)?;
            let elapsed = millis(start);
            let rows = trace
                .steps
                .iter()
                .enumerate()
                .map(|(k, step)| {
                    let mut row = base_row(cfg, dims, strategy.name(), seed);
                    row.failures = k as i64;
                    row.kappa = Some(step.kappa_hat);
                    row.d_metric = Some(step.d_hat);
                    row.excluded = step.excluded_components;
                    row.detail = format!(
                        "failed={};components={}",
                        join(&trace.failed_nodes[..k]),
                        step.components.len()
                    );
                    row.wall_time_ms = elapsed;
                    row
                })
                .collect::<Vec<_>>();
            Ok(rows)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ResultTable::new(per_trial.into_iter().flatten().collect()))
}

/// Annealing runs per lattice × trial, keeping the best topologies.
pub fn run_optimize(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    check_experiment(cfg, Experiment::Optimize)?;
    let graphs: Vec<([usize; 2], LabeledGraph)> = cfg
        .lattice_list
        .iter()
        .map(|&[m, n]| ([m, n], LabeledGraph::grid(m, n)))
        .collect();
    optimize_graphs(cfg, &graphs)
}

/// As [`run_optimize`], over an arbitrary connectivity graph (reported with
/// dims `0 × n`).
pub fn run_optimize_on_graph(cfg: &ExperimentConfig, g: &LabeledGraph) -> Result<ExperimentOutput> {
    if g.vertex_count() < cfg.node_count {
        return Err(Error::config(
            "node_count",
            format!("graph has only {} vertices", g.vertex_count()),
        ));
    }
    optimize_graphs(cfg, &[([0, g.vertex_count()], g.clone())])
}

fn optimize_graphs(
    cfg: &ExperimentConfig,
    graphs: &[([usize; 2], LabeledGraph)],
) -> Result<ExperimentOutput> {
    let tasks: Vec<(usize, u64)> = (0..graphs.len())
        .flat_map(|i| (0..cfg.trials).map(move |trial| (i, trial_seed(cfg.seed, trial))))
        .collect();
    let results = tasks
        .into_par_iter()
        .map(|(i, seed)| {
            let (dims, g) = &graphs[i];
            let start = Instant::now();
            let report = anneal(g, cfg.node_count, seed, cfg.sa_params)?;
            let mut t =
                EntanglementTopology::new(g.clone(), report.coloring, cfg.mu, cfg.decorated)?;
            if dims[0] > 0 {
                t = EntanglementTopology::build_lattice(
                    dims[0],
                    dims[1],
                    cfg.mu,
                    cfg.decorated,
                    t.coloring().clone(),
                )?;
            }
            let mut row = base_row(cfg, *dims, Strategy::Optimized.name(), seed);
            row.objective = Some(report.best.0 as f64);
            row.kappa = t.kappa_bar().ok();
            row.qubits = Some(t.memory_report().total);
            row.detail = format!(
                "initial={};sum_worst={};accepted={}",
                report.initial.0, report.best.1, report.accepted
            );
            row.wall_time_ms = millis(start);
            Ok((row, t.to_document()))
        })
        .collect::<Result<Vec<_>>>()?;
    let (rows, topologies) = results.into_iter().unzip();
    Ok(ExperimentOutput {
        table: ResultTable::new(rows),
        topologies,
    })
}

/// A measurement rule under test: returns the claimed post-measurement
/// graph.
pub type MeasurementRule = dyn Fn(&GraphState, usize, Basis) -> Result<LabeledGraph> + Sync;

/// Random graphs with at most `max_qubits` qubits; every basis is applied to
/// one random qubit and checked against the statevector oracle.
pub fn run_graphstate_verify(cfg: &ExperimentConfig) -> Result<ResultTable> {
    run_graphstate_verify_with(cfg, &|state, a, basis| {
        state.measure_pauli(a, basis, None).map(|o| o.result_graph)
    })
}

/// As [`run_graphstate_verify`], with a substitute rule. Failing rows carry
/// `objective = 0` and the offending graph, qubit and basis in `detail`.
pub fn run_graphstate_verify_with(
    cfg: &ExperimentConfig,
    rule: &MeasurementRule,
) -> Result<ResultTable> {
    check_experiment(cfg, Experiment::GraphstateVerify)?;
    let rows = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let seed = trial_seed(cfg.seed, trial);
            let (graph, qubit) = random_graph(seed, cfg.max_qubits);
            let state = GraphState::from_graph(graph);
            let edges: Vec<String> = state
                .graph()
                .edges()
                .map(|(u, v)| format!("{u}-{v}"))
                .collect();
            Basis::ALL
                .iter()
                .map(|&basis| {
                    let start = Instant::now();
                    let after = rule(&state, qubit, basis)?;
                    let pass = statevector_oracle_check(&state, qubit, basis, None, &after)?;
                    let mut row = base_row(cfg, [state.qubit_count(), 0], &basis.to_string(), seed);
                    row.node_count = state.qubit_count();
                    row.objective = Some(if pass { 1.0 } else { 0.0 });
                    row.excluded = usize::from(!pass);
                    row.detail = format!("qubit={qubit};edges={}", edges.join(" "));
                    row.wall_time_ms = millis(start);
                    Ok(row)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ResultTable::new(rows.into_iter().flatten().collect()))
}

/// Erdős–Rényi graph with `G(n, 1/2)`, `n` uniform in `1..=max_qubits`,
/// plus a uniformly chosen qubit.
pub fn random_graph(seed: u64, max_qubits: usize) -> (LabeledGraph, usize) {
    let mut rng = seeded_rng(seed);
    let n = rng.random_range(1..=max_qubits);
    let mut g = LabeledGraph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(0.5) {
                g.add_edge(u, v).expect("fresh vertices are live");
            }
        }
    }
    let qubit = rng.random_range(0..n);
    (g, qubit)
}

fn check_experiment(cfg: &ExperimentConfig, expected: Experiment) -> Result<()> {
    if cfg.experiment != expected {
        return Err(Error::config(
            "experiment",
            format!(
                "expected {}, found {}",
                expected.name(),
                cfg.experiment.name()
            ),
        ));
    }
    cfg.validate()
}

fn join(nodes: &[usize]) -> String {
    nodes
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Serialize)]
struct Meta<'a> {
    software: &'static str,
    version: &'static str,
    config: &'a ExperimentConfig,
    columns: &'a [&'a str],
    rows: usize,
    summary: String,
    topologies: Option<String>,
}

/// Files written by [`write_outputs`].
#[derive(Clone, Debug)]
pub struct OutputPaths {
    pub csv: PathBuf,
    pub summary: PathBuf,
    pub meta: PathBuf,
    pub topologies: Option<PathBuf>,
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(suffix);
    path.with_file_name(name)
}

/// Writes `<out>` (raw rows), `<out>.summary.csv` (per-cell mean/std),
/// `<out>.meta.json` (resolved config and version) and, for `optimize`,
/// `<out>.topologies.json`.
pub fn write_outputs(
    out: &Path,
    cfg: &ExperimentConfig,
    output: &ExperimentOutput,
) -> Result<OutputPaths> {
    let paths = OutputPaths {
        csv: out.to_path_buf(),
        summary: sibling(out, ".summary.csv"),
        meta: sibling(out, ".meta.json"),
        topologies: (!output.topologies.is_empty()).then(|| sibling(out, ".topologies.json")),
    };
    output.table.write_csv(std::fs::File::create(&paths.csv)?)?;
    output
        .table
        .write_summary_csv(std::fs::File::create(&paths.summary)?)?;
    if let Some(path) = &paths.topologies {
        std::fs::write(path, serde_json::to_string_pretty(&output.topologies)?)?;
    }
    let file_name = |p: &Path| {
        p.file_name()
            .unwrap_or_default()
            .to_string_lossy()
            .into_owned()
    };
    let meta = Meta {
        software: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config: cfg,
        columns: &RESULT_COLUMNS,
        rows: output.table.rows.len(),
        summary: file_name(&paths.summary),
        topologies: paths.topologies.as_deref().map(file_name),
    };
    std::fs::write(&paths.meta, serde_json::to_string_pretty(&meta)?)?;
    Ok(paths)
}
