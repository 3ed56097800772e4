//! Single-deviation analysis: equilibrium certification, exhaustive
//! enumeration on small `n`, and the closed-form characterizations.

mod characterization;
mod fixture;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{DiGraph, NodeId};
use crate::payoff::{utility_with_levels, AgentType, UtilityParams};

pub use characterization::{
    consensual_conditions, nonconsensual_conditions, Condition, ConditionReport, InequalityCheck,
    Relation, StructuralCheck,
};
pub use fixture::{layered_teams_fixture, FixtureError};

/// Largest `n` accepted by [`enumerate_equilibria`] (`2^20` graphs).
pub const MAX_ENUMERATION_NODES: usize = 5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EquilibriumError {
    #[error("exhaustive enumeration supports 3 <= n <= {MAX_ENUMERATION_NODES}, got {0}")]
    EnumerationRange(usize),
    #[error(transparent)]
    Params(#[from] crate::payoff::ParamsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeviationKind {
    Sever,
    Add,
}

/// Outcome of agent `i` toggling its edge to `j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationReport {
    pub pair: (NodeId, NodeId),
    pub kind: DeviationKind,
    pub u_i_before: f64,
    pub u_i_after: f64,
    /// Populated when `j`'s consent was evaluated.
    pub u_j_before: Option<f64>,
    pub u_j_after: Option<f64>,
    /// `u_i_after >= u_i_before`: the toggle is weakly better for `i`.
    pub improving_for_i: bool,
    /// Consensual additions only.
    pub consented_by_j: Option<bool>,
}

impl DeviationReport {
    /// Whether this deviation breaks the equilibrium requirement for the pair.
    pub fn is_violation(&self) -> bool {
        match self.consented_by_j {
            Some(consent) => self.improving_for_i && consent,
            None => self.improving_for_i,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumCertificate {
    pub is_equilibrium: bool,
    pub violations: Vec<DeviationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub characterization: Option<ConditionReport>,
}

/// Evaluates the toggle of `(i, j)` on `g`.
///
/// Consent of `j` is evaluated only for consensual additions that `i` weakly
/// prefers.
pub fn evaluate_deviation(
    g: &DiGraph,
    i: NodeId,
    j: NodeId,
    params: &UtilityParams,
    agent_type: AgentType,
) -> DeviationReport {
    let levels = g.levels();
    evaluate_deviation_with(
        g,
        utility_with_levels(i, g, &levels, params),
        || utility_with_levels(j, g, &levels, params),
        i,
        j,
        params,
        agent_type,
    )
}

pub(crate) fn evaluate_deviation_with(
    g: &DiGraph,
    u_i_before: f64,
    u_j_before: impl FnOnce() -> f64,
    i: NodeId,
    j: NodeId,
    params: &UtilityParams,
    agent_type: AgentType,
) -> DeviationReport {
    let kind = if g.has_edge(i, j) {
        DeviationKind::Sever
    } else {
        DeviationKind::Add
    };
    let g2 = g.toggled(i, j);
    let l2 = g2.levels();
    let u_i_after = utility_with_levels(i, &g2, &l2, params);
    let improving_for_i = params.weakly_greater(u_i_after, u_i_before);

    let mut report = DeviationReport {
        pair: (i, j),
        kind,
        u_i_before,
        u_i_after,
        u_j_before: None,
        u_j_after: None,
        improving_for_i,
        consented_by_j: None,
    };
    if kind == DeviationKind::Add && agent_type == AgentType::Consensual && improving_for_i {
        let before = u_j_before();
        let after = utility_with_levels(j, &g2, &l2, params);
        report.u_j_before = Some(before);
        report.u_j_after = Some(after);
        report.consented_by_j = Some(params.weakly_greater(after, before));
    }
    report
}

fn all_utilities(g: &DiGraph, params: &UtilityParams) -> Vec<f64> {
    let levels = g.levels();
    g.nodes()
        .map(|i| utility_with_levels(i, g, &levels, params))
        .collect()
}

/// Checks every ordered pair against the equilibrium requirements and
/// collects all violations.
pub fn is_equilibrium(
    g: &DiGraph,
    params: &UtilityParams,
    agent_type: AgentType,
) -> EquilibriumCertificate {
    let u = all_utilities(g, params);
    let violations: Vec<_> = DiGraph::ordered_pairs(g.n())
        .map(|(i, j)| evaluate_deviation_with(g, u[i], || u[j], i, j, params, agent_type))
        .filter(DeviationReport::is_violation)
        .collect();
    EquilibriumCertificate {
        is_equilibrium: violations.is_empty(),
        violations,
        characterization: None,
    }
}

/// [`is_equilibrium`] plus the closed-form characterization for the agent
/// type.
pub fn certify(
    g: &DiGraph,
    params: &UtilityParams,
    agent_type: AgentType,
) -> EquilibriumCertificate {
    let mut cert = is_equilibrium(g, params, agent_type);
    cert.characterization = Some(characterize(g, params, agent_type));
    cert
}

/// Dispatches to the characterization matching `agent_type`.
pub fn characterize(g: &DiGraph, params: &UtilityParams, agent_type: AgentType) -> ConditionReport {
    match agent_type {
        AgentType::NonConsensual => nonconsensual_conditions(g, params),
        AgentType::Consensual => consensual_conditions(g, params),
    }
}

/// Boolean equilibrium test that stops at the first violation.
pub fn is_equilibrium_graph(g: &DiGraph, params: &UtilityParams, agent_type: AgentType) -> bool {
    let u = all_utilities(g, params);
    DiGraph::ordered_pairs(g.n()).all(|(i, j)| {
        !evaluate_deviation_with(g, u[i], || u[j], i, j, params, agent_type).is_violation()
    })
}

/// All equilibrium networks on `n` nodes, by brute force over the
/// `2^(n(n-1))` digraphs, sorted by edge list.
pub fn enumerate_equilibria(
    n: usize,
    params: &UtilityParams,
    agent_type: AgentType,
) -> Result<Vec<DiGraph>, EquilibriumError> {
    enumerate_where(n, params, |g| is_equilibrium_graph(g, params, agent_type))
}

/// Every digraph on `n` nodes satisfying `pred`, sorted by edge list.
pub fn enumerate_where<F>(
    n: usize,
    params: &UtilityParams,
    pred: F,
) -> Result<Vec<DiGraph>, EquilibriumError>
where
    F: Fn(&DiGraph) -> bool + Sync,
{
    if !(3..=MAX_ENUMERATION_NODES).contains(&n) {
        return Err(EquilibriumError::EnumerationRange(n));
    }
    params.validate_for(n)?;
    let total = 1u64 << (n * (n - 1));
    let mut found: Vec<DiGraph> = (0..total)
        .into_par_iter()
        .filter_map(|mask| {
            let g = DiGraph::from_pair_mask(n, mask).expect("n validated");
            pred(&g).then_some(g)
        })
        .collect();
    found.sort_by_cached_key(|g| g.edge_vec());
    Ok(found)
}
