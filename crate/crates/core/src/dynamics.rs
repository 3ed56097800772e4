//! The random-pair formation process: one better-response flip per step,
//! with consent for additions when agents are consensual.
//!
//! Randomness comes from `ChaCha8Rng` seeded with `seed_from_u64`. Batch run
//! `k` with base seed `s` uses seed `s.wrapping_add(k)`. A random initial
//! graph is drawn from the run's generator before the first pair.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canon::{canonical_form, CanonicalForm};
use crate::equilibrium::{evaluate_deviation, is_equilibrium_graph, DeviationKind};
use crate::graph::{DiGraph, GraphError, NodeId};
use crate::payoff::{AgentType, ParamsError, UtilityParams};

/// Name of the generator behind every seeded stream.
pub const RNG_NAME: &str = "chacha8-rand_chacha-0.9";
pub const DEFAULT_MAX_STEPS: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error("weight table must be {n}x{n}")]
    WeightShape { n: usize },
    #[error("weight for pair ({i}, {j}) must be positive and finite, got {w}")]
    Weight { i: NodeId, j: NodeId, w: f64 },
    #[error("scripted pair ({i}, {j}) is not a pair of distinct nodes below {n}")]
    ScriptedPair { i: NodeId, j: NodeId, n: usize },
    #[error("edge probability must lie in [0, 1], got {0}")]
    EdgeProbability(f64),
    #[error("absorption_check_interval must be at least 1")]
    CheckInterval,
    #[error("initial graph has {got} nodes, expected {expected}")]
    InitialSize { got: usize, expected: usize },
    #[error("runs must be at least 1")]
    NoRuns,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PairSelector {
    /// Every ordered pair with equal probability.
    #[default]
    Uniform,
    /// `weights[i][j]` is proportional to the probability of `(i, j)`; the
    /// diagonal is ignored.
    Weighted { weights: Vec<Vec<f64>> },
    /// The listed pairs in order, then `fallback`.
    Scripted {
        pairs: Vec<(NodeId, NodeId)>,
        fallback: Box<PairSelector>,
    },
}

impl PairSelector {
    pub fn scripted(pairs: Vec<(NodeId, NodeId)>) -> Self {
        PairSelector::Scripted {
            pairs,
            fallback: Box::new(PairSelector::Uniform),
        }
    }

    pub fn validate_for(&self, n: usize) -> Result<(), DynamicsError> {
        match self {
            PairSelector::Uniform => Ok(()),
            PairSelector::Weighted { weights } => {
                if weights.len() != n || weights.iter().any(|row| row.len() != n) {
                    return Err(DynamicsError::WeightShape { n });
                }
                for (i, j) in DiGraph::ordered_pairs(n) {
                    let w = weights[i][j];
                    if !(w.is_finite() && w > 0.0) {
                        return Err(DynamicsError::Weight { i, j, w });
                    }
                }
                Ok(())
            }
            PairSelector::Scripted { pairs, fallback } => {
                if let Some(&(i, j)) = pairs.iter().find(|&&(i, j)| i == j || i >= n || j >= n) {
                    return Err(DynamicsError::ScriptedPair { i, j, n });
                }
                fallback.validate_for(n)
            }
        }
    }

    fn prepare(&self, n: usize) -> Sampler {
        match self {
            PairSelector::Uniform => Sampler::Uniform,
            PairSelector::Weighted { weights } => {
                let pairs: Vec<_> = DiGraph::ordered_pairs(n).collect();
                let dist = WeightedIndex::new(pairs.iter().map(|&(i, j)| weights[i][j]))
                    .expect("weights validated");
                Sampler::Weighted(dist, pairs)
            }
            PairSelector::Scripted { pairs, fallback } => {
                Sampler::Scripted(pairs.clone(), Box::new(fallback.prepare(n)))
            }
        }
    }
}

enum Sampler {
    Uniform,
    Weighted(WeightedIndex<f64>, Vec<(NodeId, NodeId)>),
    Scripted(Vec<(NodeId, NodeId)>, Box<Sampler>),
}

impl Sampler {
    fn next(&self, n: usize, cursor: &mut usize, rng: &mut ChaCha8Rng) -> (NodeId, NodeId) {
        match self {
            Sampler::Uniform => {
                let k = rng.random_range(0..n * (n - 1));
                let (i, r) = (k / (n - 1), k % (n - 1));
                (i, if r >= i { r + 1 } else { r })
            }
            Sampler::Weighted(dist, pairs) => pairs[dist.sample(rng)],
            Sampler::Scripted(pairs, fallback) => match pairs.get(*cursor) {
                Some(&p) => {
                    *cursor += 1;
                    p
                }
                None => fallback.next(n, cursor, rng),
            },
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialGraph {
    #[default]
    Empty,
    Complete,
    /// Each ordered pair present independently.
    Random {
        edge_probability: f64,
    },
    Graph {
        graph: DiGraph,
    },
}

impl InitialGraph {
    pub fn validate_for(&self, n: usize) -> Result<(), DynamicsError> {
        match self {
            InitialGraph::Random {
                edge_probability: p,
            } if !(0.0..=1.0).contains(p) => Err(DynamicsError::EdgeProbability(*p)),
            InitialGraph::Graph { graph } if graph.n() != n => Err(DynamicsError::InitialSize {
                got: graph.n(),
                expected: n,
            }),
            _ => Ok(()),
        }
    }

    fn realize(&self, n: usize, rng: &mut ChaCha8Rng) -> Result<DiGraph, GraphError> {
        match self {
            InitialGraph::Empty => DiGraph::empty(n),
            InitialGraph::Complete => DiGraph::complete(n),
            InitialGraph::Random { edge_probability } => DiGraph::from_edges(
                n,
                DiGraph::ordered_pairs(n)
                    .filter(|_| rng.random_bool(*edge_probability))
                    .collect::<Vec<_>>(),
            ),
            InitialGraph::Graph { graph } => Ok(graph.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Added,
    Severed,
    Kept,
    BlockedByConsent,
    /// The toggle left `i` exactly as well off and was carried out.
    SwitchOnIndifference,
}

impl Decision {
    pub fn changes_graph(self) -> bool {
        matches!(
            self,
            Decision::Added | Decision::Severed | Decision::SwitchOnIndifference
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub t: u64,
    pub pair: (NodeId, NodeId),
    pub action: DeviationKind,
    pub decision: Decision,
    pub u_i_before: f64,
    pub u_i_after: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_j_before: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_j_after: Option<f64>,
}

pub struct ProcessState {
    pub t: u64,
    pub graph: DiGraph,
    rng: ChaCha8Rng,
    script_cursor: usize,
}

impl ProcessState {
    pub fn new(graph: DiGraph, seed: u64) -> Self {
        Self::with_rng(graph, ChaCha8Rng::seed_from_u64(seed))
    }

    fn with_rng(graph: DiGraph, rng: ChaCha8Rng) -> Self {
        ProcessState {
            t: 0,
            graph,
            rng,
            script_cursor: 0,
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

/// Lets `i` reconsider its edge to `j` and applies the outcome to `state`.
///
/// `i` flips when the flipped state is at least as good for it; an addition
/// by a consensual agent also needs `j` to be at least as well off.
pub fn step(
    state: &mut ProcessState,
    (i, j): (NodeId, NodeId),
    params: &UtilityParams,
    agent_type: AgentType,
) -> TraceEvent {
    assert!(i != j, "step needs two distinct agents");
    let d = evaluate_deviation(&state.graph, i, j, params, agent_type);
    let indifferent = !params.strictly_greater(d.u_i_after, d.u_i_before);
    let decision = match (d.kind, d.improving_for_i, d.consented_by_j) {
        (_, false, _) => Decision::Kept,
        (DeviationKind::Add, true, Some(false)) => Decision::BlockedByConsent,
        (_, true, _) if indifferent => Decision::SwitchOnIndifference,
        (DeviationKind::Add, true, _) => Decision::Added,
        (DeviationKind::Sever, true, _) => Decision::Severed,
    };
    let event = TraceEvent {
        t: state.t,
        pair: (i, j),
        action: d.kind,
        decision,
        u_i_before: d.u_i_before,
        u_i_after: d.u_i_after,
        u_j_before: d.u_j_before,
        u_j_after: d.u_j_after,
    };
    if decision.changes_graph() {
        state.graph = state.graph.toggled(i, j);
    }
    state.t += 1;
    event
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    pub params: UtilityParams,
    pub agent_type: AgentType,
    #[serde(default)]
    pub selector: PairSelector,
    #[serde(default)]
    pub initial: InitialGraph,
    pub seed: u64,
    #[serde(default = "default_max_steps")]
    pub max_steps: u64,
    #[serde(default = "default_interval")]
    pub absorption_check_interval: u64,
    /// Maximum number of trace events kept; 0 disables tracing.
    #[serde(default)]
    pub trace_limit: usize,
}

fn default_max_steps() -> u64 {
    DEFAULT_MAX_STEPS
}

fn default_interval() -> u64 {
    1
}

impl RunConfig {
    pub fn new(n: usize, params: UtilityParams, agent_type: AgentType, seed: u64) -> Self {
        RunConfig {
            n,
            params,
            agent_type,
            selector: PairSelector::Uniform,
            initial: InitialGraph::Empty,
            seed,
            max_steps: DEFAULT_MAX_STEPS,
            absorption_check_interval: 1,
            trace_limit: 0,
        }
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        DiGraph::empty(self.n)?;
        self.params.validate_for(self.n)?;
        self.selector.validate_for(self.n)?;
        self.initial.validate_for(self.n)?;
        if self.absorption_check_interval == 0 {
            return Err(DynamicsError::CheckInterval);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub seed: u64,
    pub converged: bool,
    pub initial_graph: DiGraph,
    pub final_graph: DiGraph,
    /// Steps taken before the equilibrium was detected.
    pub absorption_time: Option<u64>,
    pub steps: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<TraceEvent>,
    #[serde(default)]
    pub trace_truncated: bool,
}

pub fn run(config: &RunConfig) -> Result<RunResult, DynamicsError> {
    config.validate()?;
    Ok(run_validated(config, config.seed))
}

fn run_validated(config: &RunConfig, seed: u64) -> RunResult {
    let n = config.n;
    let (params, agent_type) = (&config.params, config.agent_type);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let initial = config
        .initial
        .realize(n, &mut rng)
        .expect("initial graph validated");
    let sampler = config.selector.prepare(n);
    let mut state = ProcessState::with_rng(initial.clone(), rng);
    let mut trace = Vec::new();
    let mut trace_truncated = false;

    let mut converged = is_equilibrium_graph(&state.graph, params, agent_type);
    while !converged && state.t < config.max_steps {
        let pair = sampler.next(n, &mut state.script_cursor, &mut state.rng);
        let event = step(&mut state, pair, params, agent_type);
        let changed = event.decision.changes_graph();
        if trace.len() < config.trace_limit {
            trace.push(event);
        } else if config.trace_limit > 0 {
            trace_truncated = true;
        }
        if changed || state.t.is_multiple_of(config.absorption_check_interval) {
            converged = is_equilibrium_graph(&state.graph, params, agent_type);
        }
    }
    RunResult {
        seed,
        converged,
        initial_graph: initial,
        final_graph: state.graph,
        absorption_time: converged.then_some(state.t),
        steps: state.t,
        trace,
        trace_truncated,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BatchSeeds {
    /// Run `k` uses `base + k`.
    Base(u64),
    List(Vec<u64>),
}

impl BatchSeeds {
    pub fn seeds(&self, runs: usize) -> Vec<u64> {
        match self {
            BatchSeeds::Base(b) => (0..runs as u64).map(|k| b.wrapping_add(k)).collect(),
            BatchSeeds::List(v) => v.iter().copied().cycle().take(runs).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeStats {
    pub min: u64,
    pub max: u64,
    pub mean: f64,
    pub median: f64,
}

impl TimeStats {
    fn from_times(mut times: Vec<u64>) -> Option<Self> {
        if times.is_empty() {
            return None;
        }
        times.sort_unstable();
        let k = times.len();
        let median = if k % 2 == 1 {
            times[k / 2] as f64
        } else {
            (times[k / 2 - 1] + times[k / 2]) as f64 / 2.0
        };
        Some(TimeStats {
            min: times[0],
            max: times[k - 1],
            mean: times.iter().sum::<u64>() as f64 / k as f64,
            median,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassFrequency {
    pub canonical: CanonicalForm,
    pub edges: Vec<(NodeId, NodeId)>,
    pub count: usize,
    /// Share of all runs.
    pub frequency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub runs: usize,
    pub converged: usize,
    pub convergence_rate: f64,
    pub absorption_time: Option<TimeStats>,
    /// Converged final graphs up to isomorphism, most frequent first; empty
    /// when `n` is too large for canonical labeling.
    pub classes: Vec<ClassFrequency>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchResult {
    pub summary: BatchSummary,
    pub results: Vec<RunResult>,
}

/// Runs `runs` independent copies of `config` in parallel; `config.seed` is
/// ignored in favor of `seeds`.
pub fn batch(
    config: &RunConfig,
    runs: usize,
    seeds: &BatchSeeds,
) -> Result<BatchResult, DynamicsError> {
    config.validate()?;
    if runs == 0 || matches!(seeds, BatchSeeds::List(v) if v.is_empty()) {
        return Err(DynamicsError::NoRuns);
    }
    let results: Vec<RunResult> = seeds
        .seeds(runs)
        .into_par_iter()
        .map(|seed| run_validated(config, seed))
        .collect();
    Ok(BatchResult {
        summary: summarize(&results),
        results,
    })
}

pub fn summarize(results: &[RunResult]) -> BatchSummary {
    let runs = results.len();
    let converged: Vec<_> = results.iter().filter(|r| r.converged).collect();
    let mut counts = std::collections::BTreeMap::<CanonicalForm, usize>::new();
    for r in &converged {
        if let Some(f) = canonical_form(&r.final_graph) {
            *counts.entry(f).or_default() += 1;
        }
    }
    let mut classes: Vec<_> = counts
        .into_iter()
        .map(|(canonical, count)| ClassFrequency {
            edges: canonical.edges(),
            canonical,
            count,
            frequency: count as f64 / runs as f64,
        })
        .collect();
    classes.sort_by(|a, b| b.count.cmp(&a.count).then(a.canonical.cmp(&b.canonical)));
    BatchSummary {
        runs,
        converged: converged.len(),
        convergence_rate: converged.len() as f64 / runs.max(1) as f64,
        absorption_time: TimeStats::from_times(
            converged.iter().filter_map(|r| r.absorption_time).collect(),
        ),
        classes,
    }
}
