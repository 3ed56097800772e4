//! Experiment drivers behind the subcommands.

use anyhow::Result;
use hiernet::crossval::{crossval, CrossvalReport};
use hiernet::dynamics::{batch, run, summarize, BatchSeeds, BatchSummary, RunResult, RNG_NAME};
use hiernet::equilibrium::{
    certify, characterize, enumerate_equilibria, is_equilibrium, ConditionReport,
    EquilibriumCertificate, EquilibriumError,
};
use hiernet::graph::{classify, Classification, DiGraph, NodeId};
use hiernet::grid::ParamGrid;
use hiernet::payoff::{AgentType, UtilityParams};
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Mode};
use crate::store::ResultStore;

pub const OUTPUT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run: usize,
    pub seed: u64,
    pub converged: bool,
    pub absorption_time: Option<u64>,
    pub steps: u64,
    pub initial_edges: Vec<(NodeId, NodeId)>,
    pub final_edges: Vec<(NodeId, NodeId)>,
    /// Trace file relative to the run directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<String>,
    #[serde(default)]
    pub trace_truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub schema_version: u32,
    pub mode: Mode,
    pub rng: String,
    /// Run `k` uses `seed + k` (wrapping).
    pub seed: u64,
    pub n: usize,
    pub agent_type: AgentType,
    pub summary: BatchSummary,
    pub runs: Vec<RunRecord>,
}

pub struct Simulation {
    pub summary: SimulationSummary,
    pub results: Vec<RunResult>,
}

/// Runs a single or batch experiment; writes config, traces, graphs and
/// summary when `store` is given.
pub fn simulate(
    cfg: &ExperimentConfig,
    seed: u64,
    store: Option<&ResultStore>,
) -> Result<Simulation> {
    let rc = cfg.run_config(seed);
    let results = match cfg.experiment.mode {
        Mode::Single => vec![run(&rc)?],
        Mode::Batch => batch(&rc, cfg.experiment.runs, &BatchSeeds::Base(seed))?.results,
        m => anyhow::bail!("{} mode is not a simulation", m.as_str()),
    };
    let mut runs = Vec::with_capacity(results.len());
    for (k, r) in results.iter().enumerate() {
        let trace = match store {
            Some(s) if cfg.experiment.outputs.traces => Some(s.write_trace(k, &r.trace)?),
            _ => None,
        };
        runs.push(RunRecord {
            run: k,
            seed: r.seed,
            converged: r.converged,
            absorption_time: r.absorption_time,
            steps: r.steps,
            initial_edges: r.initial_graph.edge_vec(),
            final_edges: r.final_graph.edge_vec(),
            trace,
            trace_truncated: r.trace_truncated,
        });
    }
    let summary = SimulationSummary {
        schema_version: OUTPUT_SCHEMA_VERSION,
        mode: cfg.experiment.mode,
        rng: RNG_NAME.to_string(),
        seed,
        n: cfg.game.n,
        agent_type: cfg.game.agent_type,
        summary: summarize(&results),
        runs,
    };
    if let Some(s) = store {
        let mut stored = cfg.clone();
        stored.process.seed = Some(seed);
        stored.experiment.outputs.dir = None;
        s.write_config(&stored)?;
        let dot = cfg.experiment.outputs.dot;
        if cfg.experiment.mode == Mode::Single {
            s.write_graph("initial", &results[0].initial_graph, dot)?;
            s.write_graph("final", &results[0].final_graph, dot)?;
        } else {
            for (k, class) in summary.summary.classes.iter().enumerate() {
                s.write_graph(&format!("class-{k:03}"), &class.canonical.graph(), dot)?;
            }
        }
        s.write_summary(&summary)?;
    }
    Ok(Simulation { summary, results })
}

/// Re-runs the experiment stored in `store` and compares summaries.
pub fn replay(store: &ResultStore) -> Result<(SimulationSummary, SimulationSummary)> {
    let cfg = store.read_config()?;
    let seed = cfg
        .process
        .seed
        .ok_or_else(|| anyhow::anyhow!("stored config has no seed"))?;
    let stored: SimulationSummary = store.read_summary()?;
    let mut fresh = simulate(&cfg, seed, None)?.summary;
    // Trace paths are only known when writing.
    for (a, b) in fresh.runs.iter_mut().zip(&stored.runs) {
        a.trace.clone_from(&b.trace);
    }
    Ok((stored, fresh))
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub schema_version: u32,
    pub graph: DiGraph,
    pub agent_type: AgentType,
    pub params: UtilityParams,
    pub certificate: EquilibriumCertificate,
    pub classification: Classification,
}

pub fn check(g: &DiGraph, params: &UtilityParams, agent_type: AgentType) -> CheckReport {
    CheckReport {
        schema_version: OUTPUT_SCHEMA_VERSION,
        graph: g.clone(),
        agent_type,
        params: params.clone(),
        certificate: certify(g, params, agent_type),
        classification: classify(g),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EnumeratedGraph {
    pub schema_version: u32,
    pub edges: Vec<(NodeId, NodeId)>,
    pub certificate: EquilibriumCertificate,
    /// Closed-form conditions, when requested.
    pub theorem_result: Option<ConditionReport>,
}

pub fn enumerate(
    n: usize,
    params: &UtilityParams,
    agent_type: AgentType,
    check_theorems: bool,
) -> Result<Vec<EnumeratedGraph>, EquilibriumError> {
    Ok(enumerate_equilibria(n, params, agent_type)?
        .iter()
        .map(|g| EnumeratedGraph {
            schema_version: OUTPUT_SCHEMA_VERSION,
            edges: g.edge_vec(),
            certificate: is_equilibrium(g, params, agent_type),
            theorem_result: check_theorems.then(|| characterize(g, params, agent_type)),
        })
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossvalOutput {
    pub schema_version: u32,
    #[serde(flatten)]
    pub report: CrossvalReport,
}

pub fn cross_validate(
    n: usize,
    grid: &ParamGrid,
    agent_types: &[AgentType],
) -> Result<CrossvalOutput, EquilibriumError> {
    Ok(CrossvalOutput {
        schema_version: OUTPUT_SCHEMA_VERSION,
        report: crossval(n, grid, agent_types)?,
    })
}
