// SPDX-License-Identifier: Apache-2.0

//! `qalloc` command-line experiment runner.
//!
//! Exit codes: 0 success, 2 config error, 3 runtime error.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qalloc::experiments::{self, Experiment, ExperimentConfig, ExperimentOutput};
use qalloc::{Error, LabeledGraph};

#[derive(Parser, Debug)]
#[command(
    name = "qalloc",
    version,
    about = "Qubit allocation experiments on lattice entanglement topologies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Min-max objective and κ̄ per lattice, strategy and trial.
    StaticEval(Common),
    /// Total qubit memory against the all-to-all baseline.
    MemoryCompare(Common),
    /// κ̂ and 𝒟̂ under nested node failures.
    Resilience(Common),
    /// Anneal allocations and export the best topologies.
    Optimize {
        #[command(flatten)]
        common: Common,
        /// Edge-list file to optimize instead of the configured lattices.
        #[arg(long)]
        graph: Option<PathBuf>,
    },
    /// Check the Pauli measurement rules against the statevector oracle.
    GraphstateVerify(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// JSON config file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Named config: fig5, fig6, fig7, fig8, optimize, graphstate.
    #[arg(long)]
    preset: Option<String>,
    /// Base seed; trial i uses seed + i.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Raw CSV path; sidecars are written next to it. Prints to stdout when
    /// absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    workers: Option<usize>,
}

fn default_preset(experiment: Experiment) -> &'static str {
    match experiment {
        Experiment::StaticEval => "fig5",
        Experiment::MemoryCompare => "fig6",
        Experiment::Resilience => "fig7",
        Experiment::Optimize => "optimize",
        Experiment::GraphstateVerify => "graphstate",
    }
}

fn resolve(experiment: Experiment, common: &Common) -> qalloc::Result<ExperimentConfig> {
    let mut cfg = match (&common.config, &common.preset) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(name)) => ExperimentConfig::preset(name)?,
        (None, None) => ExperimentConfig::preset(default_preset(experiment))?,
    };
    if cfg.experiment != experiment {
        return Err(Error::config(
            "experiment",
            format!(
                "config is for {}, but the {} subcommand was run",
                cfg.experiment.name(),
                experiment.name()
            ),
        ));
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = common.trials {
        cfg.trials = trials;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn load_graph(path: &PathBuf) -> qalloc::Result<LabeledGraph> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config("graph", format!("{}: {e}", path.display())))?;
    LabeledGraph::parse_edge_list(&text).map_err(|e| Error::config("graph", e.to_string()))
}

fn execute(cli: Cli) -> qalloc::Result<()> {
    let (experiment, common, graph) = match &cli.command {
        Command::StaticEval(c) => (Experiment::StaticEval, c, None),
        Command::MemoryCompare(c) => (Experiment::MemoryCompare, c, None),
        Command::Resilience(c) => (Experiment::Resilience, c, None),
        Command::Optimize { common, graph } => (Experiment::Optimize, common, graph.as_ref()),
        Command::GraphstateVerify(c) => (Experiment::GraphstateVerify, c, None),
    };
    let cfg = resolve(experiment, common)?;
    let output: ExperimentOutput = match graph {
        Some(path) => {
            let g = load_graph(path)?;
            experiments::with_workers(common.workers, || {
                experiments::run_optimize_on_graph(&cfg, &g)
            })?
        }
        None => experiments::run(&cfg, common.workers)?,
    };
    match &common.out {
        Some(out) => {
            let paths = experiments::write_outputs(out, &cfg, &output)?;
            eprintln!(
                "wrote {} rows to {} (summary {}, meta {})",
                output.table.rows.len(),
                paths.csv.display(),
                paths.summary.display(),
                paths.meta.display()
            );
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            output.table.write_csv(&mut stdout)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::Config { .. }) => {
            eprintln!("qalloc: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("qalloc: {e}");
            ExitCode::from(3)
        }
    }
}
