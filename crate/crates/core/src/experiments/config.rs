// SPDX-License-Identifier: Apache-2.0

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::allocation::{SaParams, Strategy};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    StaticEval,
    MemoryCompare,
    Resilience,
    Optimize,
    GraphstateVerify,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::StaticEval => "static-eval",
            Experiment::MemoryCompare => "memory-compare",
            Experiment::Resilience => "resilience",
            Experiment::Optimize => "optimize",
            Experiment::GraphstateVerify => "graphstate-verify",
        }
    }
}

fn default_true() -> bool {
    true
}

fn default_class_sizes() -> Vec<usize> {
    vec![1, 2, 3, 4]
}

fn default_node_sweep() -> Vec<usize> {
    (1..=10).map(|i| 2 * i).collect()
}

fn default_max_qubits() -> usize {
    8
}

/// Batch experiment parameters. Trial `i` runs with seed `seed + i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub node_count: usize,
    #[serde(default)]
    pub lattice_list: Vec<[usize; 2]>,
    #[serde(default)]
    pub strategies: Vec<Strategy>,
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub mu: usize,
    #[serde(default)]
    pub decorated: bool,
    #[serde(default)]
    pub failures_max: Option<usize>,
    #[serde(default)]
    pub sa_params: SaParams,
    /// Re-heal after every failure (resilience).
    #[serde(default = "default_true")]
    pub reheal: bool,
    /// Node counts swept by memory-compare.
    #[serde(default = "default_node_sweep")]
    pub node_sweep: Vec<usize>,
    /// Vertices per node compared by memory-compare.
    #[serde(default = "default_class_sizes")]
    pub class_sizes: Vec<usize>,
    /// Largest random graph sampled by graphstate-verify.
    #[serde(default = "default_max_qubits")]
    pub max_qubits: usize,
}

fn one() -> usize {
    1
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::config("config", e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("config", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Checks the invariants of the selected experiment; the error names
    /// the offending field.
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::config("trials", "must be positive"));
        }
        if self.mu == 0 {
            return Err(Error::config("mu", "must be positive"));
        }
        self.sa_params
            .validate()
            .map_err(|e| Error::config("sa_params", e.to_string()))?;
        match self.experiment {
            Experiment::StaticEval | Experiment::Optimize | Experiment::Resilience => {
                if self.node_count < 2 {
                    return Err(Error::config("node_count", "at least two nodes are needed"));
                }
                if self.lattice_list.is_empty() {
                    return Err(Error::config("lattice_list", "no lattice given"));
                }
                for &[m, n] in &self.lattice_list {
                    if m == 0 || n == 0 {
                        return Err(Error::config("lattice_list", format!("{m}x{n} is empty")));
                    }
                    if m * n < self.node_count {
                        return Err(Error::config(
                            "lattice_list",
                            format!("{m}x{n} has fewer vertices than {} nodes", self.node_count),
                        ));
                    }
                }
                if self.experiment != Experiment::Optimize && self.strategies.is_empty() {
                    return Err(Error::config("strategies", "no strategy selected"));
                }
            }
            Experiment::MemoryCompare => {
                if self.node_sweep.iter().any(|&c| c < 2) || self.node_sweep.is_empty() {
                    return Err(Error::config(
                        "node_sweep",
                        "node counts must be at least 2",
                    ));
                }
                if self.class_sizes.contains(&0) {
                    return Err(Error::config("class_sizes", "class sizes must be positive"));
                }
            }
            Experiment::GraphstateVerify => {
                if self.max_qubits == 0 || self.max_qubits > crate::statevector::ORACLE_QUBIT_LIMIT
                {
                    return Err(Error::config(
                        "max_qubits",
                        format!("must lie in 1..={}", crate::statevector::ORACLE_QUBIT_LIMIT),
                    ));
                }
            }
        }
        if self.experiment == Experiment::Resilience {
            match self.failures_max {
                None => return Err(Error::config("failures_max", "required for resilience")),
                Some(k) if k >= self.node_count => {
                    return Err(Error::config(
                        "failures_max",
                        format!(
                            "{k} failures leave no surviving node out of {}",
                            self.node_count
                        ),
                    ))
                }
                Some(_) => {}
            }
        }
        Ok(())
    }

    /// Named configurations reproducing the static and resilience studies.
    ///
    /// * `fig5`: static evaluation, 20 nodes, 23 lattices, 100 trials.
    /// * `fig6`: memory comparison against the all-to-all baseline.
    /// * `fig7`: resilience, 8 decorated nodes, square lattices up to 15×15.
    /// * `fig8`: as `fig7` with lattices up to 25×25.
    /// * `optimize`: annealing on the `fig5` lattices.
    /// * `graphstate`: 200 random graphs through the statevector oracle.
    pub fn preset(name: &str) -> Result<Self> {
        let base = Self {
            experiment: Experiment::StaticEval,
            node_count: 20,
            lattice_list: Vec::new(),
            strategies: Strategy::ALL.to_vec(),
            trials: 100,
            seed: 0,
            mu: 1,
            decorated: false,
            failures_max: None,
            sa_params: SaParams::default(),
            reheal: true,
            node_sweep: default_node_sweep(),
            class_sizes: default_class_sizes(),
            max_qubits: default_max_qubits(),
        };
        let squares = |max: usize| (3..=max).map(|s| [s, s]).collect::<Vec<_>>();
        let cfg =
            match name {
                "fig5" => Self {
                    lattice_list: FIG5_LATTICES.to_vec(),
                    ..base
                },
                "fig6" => Self {
                    experiment: Experiment::MemoryCompare,
                    decorated: true,
                    trials: 10,
                    ..base
                },
                "fig7" | "fig8" => Self {
                    experiment: Experiment::Resilience,
                    node_count: 8,
                    decorated: true,
                    failures_max: Some(7),
                    lattice_list: squares(if name == "fig7" { 15 } else { 25 }),
                    trials: 50,
                    ..base
                },
                "optimize" => Self {
                    experiment: Experiment::Optimize,
                    lattice_list: FIG5_LATTICES.to_vec(),
                    strategies: vec![Strategy::Optimized],
                    trials: 10,
                    ..base
                },
                "graphstate" => Self {
                    experiment: Experiment::GraphstateVerify,
                    node_count: 1,
                    trials: 200,
                    ..base
                },
                other => return Err(Error::config(
                    "preset",
                    format!(
                        "unknown preset `{other}` (fig5, fig6, fig7, fig8, optimize, graphstate)"
                    ),
                )),
            };
        Ok(cfg)
    }
}

/// Lattices of the 20-node static study, grouped by |S_c| = 1..5.
pub const FIG5_LATTICES: [[usize; 2]; 23] = [
    [1, 20],
    [2, 10],
    [4, 5],
    [1, 40],
    [2, 20],
    [4, 10],
    [5, 8],
    [1, 60],
    [2, 30],
    [3, 20],
    [4, 15],
    [5, 12],
    [6, 10],
    [1, 80],
    [2, 40],
    [4, 20],
    [5, 16],
    [8, 10],
    [1, 100],
    [2, 50],
    [4, 25],
    [5, 20],
    [10, 10],
];
