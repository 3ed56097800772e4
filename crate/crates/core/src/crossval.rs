//! Brute-force equilibrium enumeration checked against the closed-form
//! characterizations.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::equilibrium::{
    characterize, is_equilibrium_graph, EquilibriumError, MAX_ENUMERATION_NODES,
};
use crate::graph::{DiGraph, NodeId};
use crate::grid::ParamGrid;
use crate::payoff::{AgentType, UtilityParams};

/// Mismatching graphs kept per point.
pub const MISMATCH_SAMPLE: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mismatch {
    pub edges: Vec<(NodeId, NodeId)>,
    pub brute_force: bool,
    pub characterized: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointReport {
    pub label: String,
    pub agent_type: AgentType,
    pub graphs: u64,
    pub brute_force: usize,
    pub characterized: usize,
    pub mismatches: usize,
    pub mismatch_sample: Vec<Mismatch>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NestingReport {
    pub label: String,
    pub nonconsensual: usize,
    pub consensual: usize,
    pub subset: bool,
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossvalReport {
    pub n: usize,
    pub grid: String,
    pub points: Vec<PointReport>,
    /// Present when both agent types were swept.
    pub nesting: Vec<NestingReport>,
    pub total_mismatches: usize,
}

/// Per-graph verdicts at one parameter point, indexed by pair mask.
fn sweep(n: usize, params: &UtilityParams, agent_type: AgentType) -> Vec<(bool, bool)> {
    let total = 1u64 << (n * (n - 1));
    (0..total)
        .into_par_iter()
        .map(|mask| {
            let g = DiGraph::from_pair_mask(n, mask).expect("n validated");
            (
                is_equilibrium_graph(&g, params, agent_type),
                characterize(&g, params, agent_type).passes,
            )
        })
        .collect()
}

pub fn crossval_point(
    n: usize,
    label: &str,
    params: &UtilityParams,
    agent_type: AgentType,
) -> Result<(PointReport, BTreeSet<u64>), EquilibriumError> {
    if !(3..=MAX_ENUMERATION_NODES).contains(&n) {
        return Err(EquilibriumError::EnumerationRange(n));
    }
    params.validate_for(n)?;
    let verdicts = sweep(n, params, agent_type);
    let mut report = PointReport {
        label: label.to_string(),
        agent_type,
        graphs: verdicts.len() as u64,
        brute_force: 0,
        characterized: 0,
        mismatches: 0,
        mismatch_sample: Vec::new(),
    };
    let mut equilibria = BTreeSet::new();
    for (mask, &(brute, chr)) in verdicts.iter().enumerate() {
        if brute {
            report.brute_force += 1;
            equilibria.insert(mask as u64);
        }
        report.characterized += chr as usize;
        if brute != chr {
            report.mismatches += 1;
            if report.mismatch_sample.len() < MISMATCH_SAMPLE {
                let g = DiGraph::from_pair_mask(n, mask as u64).expect("n validated");
                report.mismatch_sample.push(Mismatch {
                    edges: g.edge_vec(),
                    brute_force: brute,
                    characterized: chr,
                });
            }
        }
    }
    Ok((report, equilibria))
}

/// Sweeps every grid point for each agent type in `agent_types`.
pub fn crossval(
    n: usize,
    grid: &ParamGrid,
    agent_types: &[AgentType],
) -> Result<CrossvalReport, EquilibriumError> {
    let mut points = Vec::new();
    let mut nesting = Vec::new();
    for p in &grid.points {
        let mut sets = Vec::new();
        for &t in agent_types {
            let (report, eqs) = crossval_point(n, &p.label, &p.params, t)?;
            points.push(report);
            sets.push((t, eqs));
        }
        let find = |t| sets.iter().find(|(u, _)| *u == t).map(|(_, s)| s);
        if let (Some(nc), Some(c)) = (find(AgentType::NonConsensual), find(AgentType::Consensual)) {
            nesting.push(NestingReport {
                label: p.label.clone(),
                nonconsensual: nc.len(),
                consensual: c.len(),
                subset: nc.is_subset(c),
                strict: nc.is_subset(c) && nc.len() < c.len(),
            });
        }
    }
    let total_mismatches = points.iter().map(|p| p.mismatches).sum();
    Ok(CrossvalReport {
        n,
        grid: grid.name.clone(),
        points,
        nesting,
        total_mismatches,
    })
}
