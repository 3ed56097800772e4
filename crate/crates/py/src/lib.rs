//! Python bindings for `hiernet`.
//!
//! Structured results (certificates, classifications, run summaries) are
//! returned as plain dicts with the same shape as the JSON outputs of the
//! command-line tool.

use hiernet::canon;
use hiernet::crossval;
use hiernet::dynamics::{self, BatchSeeds, InitialGraph, RunConfig};
use hiernet::equilibrium;
use hiernet::graph::{self, NodeId};
use hiernet::grid::ParamGrid;
use hiernet::payoff::{self, AgentType, RewardFunction};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<T: Serialize>(py: Python<'_>, v: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(v).map_err(value_err)?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn agent(s: &str) -> PyResult<AgentType> {
    s.parse().map_err(PyValueError::new_err)
}

/// Directed graph on nodes `0..n`.
#[pyclass(name = "DiGraph", module = "hiernet", eq, from_py_object)]
#[derive(Clone, PartialEq)]
pub struct PyDiGraph {
    inner: graph::DiGraph,
}

#[pymethods]
impl PyDiGraph {
    #[new]
    #[pyo3(signature = (n, edges = Vec::new()))]
    fn new(n: usize, edges: Vec<(NodeId, NodeId)>) -> PyResult<Self> {
        graph::DiGraph::from_edges(n, edges)
            .map(|inner| PyDiGraph { inner })
            .map_err(value_err)
    }

    #[staticmethod]
    fn complete(n: usize) -> PyResult<Self> {
        graph::DiGraph::complete(n)
            .map(|inner| PyDiGraph { inner })
            .map_err(value_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        graph::DiGraph::from_json_str(text)
            .map(|inner| PyDiGraph { inner })
            .map_err(value_err)
    }

    fn to_json(&self) -> String {
        self.inner.to_json_string()
    }

    #[pyo3(signature = (name = "G"))]
    fn to_dot(&self, name: &str) -> String {
        self.inner.to_dot(name)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn edges(&self) -> Vec<(NodeId, NodeId)> {
        self.inner.edge_vec()
    }

    fn has_edge(&self, i: NodeId, j: NodeId) -> bool {
        i < self.inner.n() && j < self.inner.n() && self.inner.has_edge(i, j)
    }

    fn add_edge(&mut self, i: NodeId, j: NodeId) -> PyResult<bool> {
        self.inner.add_edge(i, j).map_err(value_err)
    }

    fn remove_edge(&mut self, i: NodeId, j: NodeId) -> PyResult<bool> {
        self.inner.remove_edge(i, j).map_err(value_err)
    }

    fn levels(&self) -> Vec<usize> {
        self.inner.levels().as_slice().to_vec()
    }

    fn classify(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &graph::classify(&self.inner))
    }

    /// Canonical edge list up to relabeling, for `n <= 8`.
    fn canonical_edges(&self) -> Option<Vec<(NodeId, NodeId)>> {
        canon::canonical_form(&self.inner).map(|f| f.edges())
    }

    fn __len__(&self) -> usize {
        self.inner.edge_count()
    }

    fn __repr__(&self) -> String {
        format!("DiGraph({}, {:?})", self.inner.n(), self.inner.edge_vec())
    }
}

/// Link value `gamma`, management cost `cost` and reward `H`, given either
/// as a table or as `h0 + slope * level`.
#[pyclass(name = "UtilityParams", module = "hiernet", eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
pub struct PyUtilityParams {
    inner: payoff::UtilityParams,
}

#[pymethods]
impl PyUtilityParams {
    #[new]
    #[pyo3(signature = (gamma, cost, table = None, h0 = 0.0, slope = None, tie_tolerance = 0.0))]
    fn new(
        gamma: f64,
        cost: f64,
        table: Option<Vec<f64>>,
        h0: f64,
        slope: Option<f64>,
        tie_tolerance: f64,
    ) -> PyResult<Self> {
        let reward = match (table, slope) {
            (Some(values), None) => RewardFunction::table(values),
            (None, Some(slope)) => RewardFunction::linear(h0, slope),
            _ => return Err(PyValueError::new_err("give exactly one of table or slope")),
        }
        .map_err(value_err)?;
        payoff::UtilityParams::new(gamma, cost, reward)
            .and_then(|p| p.with_tie_tolerance(tie_tolerance))
            .map(|inner| PyUtilityParams { inner })
            .map_err(value_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        payoff::UtilityParams::from_json_str(text)
            .map(|inner| PyUtilityParams { inner })
            .map_err(value_err)
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("params serialize")
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma()
    }

    #[getter]
    fn cost(&self) -> f64 {
        self.inner.cost()
    }

    fn reward(&self, level: usize) -> Option<f64> {
        self.inner.reward().try_value(level)
    }

    fn __repr__(&self) -> String {
        format!("UtilityParams({})", self.to_json())
    }
}

fn checked(g: &PyDiGraph, params: &PyUtilityParams) -> PyResult<()> {
    params.inner.validate_for(g.inner.n()).map_err(value_err)
}

#[pyfunction]
fn utility(g: &PyDiGraph, i: NodeId, params: &PyUtilityParams) -> PyResult<f64> {
    checked(g, params)?;
    g.inner.check_node(i).map_err(value_err)?;
    Ok(payoff::utility(i, &g.inner, &params.inner))
}

#[pyfunction]
fn utilities(g: &PyDiGraph, params: &PyUtilityParams) -> PyResult<Vec<f64>> {
    checked(g, params)?;
    Ok(payoff::utilities(&g.inner, &params.inner))
}

#[pyfunction]
fn is_equilibrium(g: &PyDiGraph, params: &PyUtilityParams, agent_type: &str) -> PyResult<bool> {
    checked(g, params)?;
    Ok(equilibrium::is_equilibrium_graph(
        &g.inner,
        &params.inner,
        agent(agent_type)?,
    ))
}

/// Violations plus the closed-form condition report, as a dict.
#[pyfunction]
fn certify(
    py: Python<'_>,
    g: &PyDiGraph,
    params: &PyUtilityParams,
    agent_type: &str,
) -> PyResult<Py<PyAny>> {
    checked(g, params)?;
    to_py(
        py,
        &equilibrium::certify(&g.inner, &params.inner, agent(agent_type)?),
    )
}

#[pyfunction]
fn enumerate_equilibria(
    py: Python<'_>,
    n: usize,
    params: &PyUtilityParams,
    agent_type: &str,
) -> PyResult<Vec<PyDiGraph>> {
    let t = agent(agent_type)?;
    let found = py
        .detach(|| equilibrium::enumerate_equilibria(n, &params.inner, t))
        .map_err(value_err)?;
    Ok(found.into_iter().map(|inner| PyDiGraph { inner }).collect())
}

/// Sweeps the bundled parameter grid, or the grid in `grid_json`.
#[pyfunction]
#[pyo3(signature = (n, grid_json = None, agent_types = None))]
fn cross_validate(
    py: Python<'_>,
    n: usize,
    grid_json: Option<&str>,
    agent_types: Option<Vec<String>>,
) -> PyResult<Py<PyAny>> {
    let grid = match grid_json {
        Some(s) => ParamGrid::from_json_str(s).map_err(value_err)?,
        None => ParamGrid::default_grid(),
    };
    let types = match agent_types {
        Some(v) => v.iter().map(|s| agent(s)).collect::<PyResult<Vec<_>>>()?,
        None => AgentType::ALL.to_vec(),
    };
    let report = py
        .detach(|| crossval::crossval(n, &grid, &types))
        .map_err(value_err)?;
    to_py(py, &report)
}

fn initial_graph(initial: Option<&Bound<'_, PyAny>>) -> PyResult<InitialGraph> {
    let Some(obj) = initial else {
        return Ok(InitialGraph::Empty);
    };
    if let Ok(g) = obj.extract::<PyDiGraph>() {
        return Ok(InitialGraph::Graph { graph: g.inner });
    }
    if let Ok(p) = obj.extract::<f64>() {
        return Ok(InitialGraph::Random {
            edge_probability: p,
        });
    }
    match obj.extract::<String>()?.as_str() {
        "empty" => Ok(InitialGraph::Empty),
        "complete" => Ok(InitialGraph::Complete),
        other => Err(PyValueError::new_err(format!(
            "initial must be \"empty\", \"complete\", an edge probability or a DiGraph, got {other:?}"
        ))),
    }
}

#[allow(clippy::too_many_arguments)]
fn run_config(
    n: usize,
    params: &PyUtilityParams,
    agent_type: &str,
    seed: u64,
    initial: Option<&Bound<'_, PyAny>>,
    max_steps: Option<u64>,
    scripted: Option<Vec<(NodeId, NodeId)>>,
    trace_limit: usize,
) -> PyResult<RunConfig> {
    let mut rc = RunConfig::new(n, params.inner.clone(), agent(agent_type)?, seed);
    rc.initial = initial_graph(initial)?;
    if let Some(m) = max_steps {
        rc.max_steps = m;
    }
    if let Some(pairs) = scripted {
        rc.selector = dynamics::PairSelector::scripted(pairs);
    }
    rc.trace_limit = trace_limit;
    rc.validate().map_err(value_err)?;
    Ok(rc)
}

/// One better-response run; `initial` is `"empty"`, `"complete"`, an edge
/// probability or a `DiGraph`.
#[pyfunction]
#[pyo3(signature = (n, params, agent_type, seed, initial = None, max_steps = None, scripted = None, trace_limit = 0))]
#[allow(clippy::too_many_arguments)]
fn run(
    py: Python<'_>,
    n: usize,
    params: &PyUtilityParams,
    agent_type: &str,
    seed: u64,
    initial: Option<&Bound<'_, PyAny>>,
    max_steps: Option<u64>,
    scripted: Option<Vec<(NodeId, NodeId)>>,
    trace_limit: usize,
) -> PyResult<Py<PyAny>> {
    let rc = run_config(
        n,
        params,
        agent_type,
        seed,
        initial,
        max_steps,
        scripted,
        trace_limit,
    )?;
    let result = py.detach(|| dynamics::run(&rc)).map_err(value_err)?;
    to_py(py, &result)
}

/// `runs` independent runs seeded `seed`, `seed + 1`, ...; returns the
/// summary with isomorphism-class frequencies.
#[pyfunction]
#[pyo3(signature = (n, params, agent_type, runs, seed, initial = None, max_steps = None))]
#[allow(clippy::too_many_arguments)]
fn batch(
    py: Python<'_>,
    n: usize,
    params: &PyUtilityParams,
    agent_type: &str,
    runs: usize,
    seed: u64,
    initial: Option<&Bound<'_, PyAny>>,
    max_steps: Option<u64>,
) -> PyResult<Py<PyAny>> {
    let rc = run_config(n, params, agent_type, seed, initial, max_steps, None, 0)?;
    let result = py
        .detach(|| dynamics::batch(&rc, runs, &BatchSeeds::Base(seed)))
        .map_err(value_err)?;
    to_py(py, &result.summary)
}

#[pymodule]
#[pyo3(name = "hiernet")]
pub fn hiernet_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDiGraph>()?;
    m.add_class::<PyUtilityParams>()?;
    m.add_function(wrap_pyfunction!(utility, m)?)?;
    m.add_function(wrap_pyfunction!(utilities, m)?)?;
    m.add_function(wrap_pyfunction!(is_equilibrium, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_equilibria, m)?)?;
    m.add_function(wrap_pyfunction!(cross_validate, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(batch, m)?)?;
    m.add("RNG_NAME", dynamics::RNG_NAME)?;
    Ok(())
}
