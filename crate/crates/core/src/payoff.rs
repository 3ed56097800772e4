//! Utility parameters and the agent payoff
//! `u_i(G) = |N_out(i)|·γ + H(ℓ_i) − c·Σ_{k ∈ N_in^s(i)} 1/|P_i(G, k)|`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{n_in_s, p_set_unchecked, DiGraph, LevelMap, NodeId, MAX_NODES};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamsError {
    #[error("gamma must be positive and finite, got {0}")]
    Gamma(f64),
    #[error("cost must be positive and finite, got {0}")]
    Cost(f64),
    #[error("reward H(0) must be nonnegative, got {0}")]
    NegativeBase(f64),
    #[error("reward table is not strictly increasing at level {level}: H({level}) = {hi} <= H({prev}) = {lo}", prev = level - 1)]
    NotIncreasing { level: usize, lo: f64, hi: f64 },
    #[error("reward slope must be positive and finite, got {0}")]
    Slope(f64),
    #[error("reward table has {len} values but levels 0..{max_level} must be covered", max_level = needed - 1)]
    TableTooShort { len: usize, needed: usize },
    #[error("tie tolerance must be nonnegative and finite, got {0}")]
    Tolerance(f64),
    #[error("non-finite reward value at level {0}")]
    NonFinite(usize),
}

/// The hierarchical reward `H`: nonnegative and strictly increasing in the
/// level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum RewardFunction {
    /// `H(l) = values[l]`.
    Table { values: Vec<f64> },
    /// `H(l) = h0 + slope·l`.
    Linear { h0: f64, slope: f64 },
}

impl RewardFunction {
    pub fn table(values: Vec<f64>) -> Result<Self, ParamsError> {
        let h = RewardFunction::Table { values };
        h.validate()?;
        Ok(h)
    }

    pub fn linear(h0: f64, slope: f64) -> Result<Self, ParamsError> {
        let h = RewardFunction::Linear { h0, slope };
        h.validate()?;
        Ok(h)
    }

    pub fn validate(&self) -> Result<(), ParamsError> {
        match self {
            RewardFunction::Table { values } => {
                if let Some(l) = values.iter().position(|v| !v.is_finite()) {
                    return Err(ParamsError::NonFinite(l));
                }
                if let Some(&h0) = values.first() {
                    if h0 < 0.0 {
                        return Err(ParamsError::NegativeBase(h0));
                    }
                }
                for (level, w) in values.windows(2).enumerate() {
                    if w[1] <= w[0] {
                        return Err(ParamsError::NotIncreasing {
                            level: level + 1,
                            lo: w[0],
                            hi: w[1],
                        });
                    }
                }
                Ok(())
            }
            &RewardFunction::Linear { h0, slope } => {
                if !h0.is_finite() {
                    return Err(ParamsError::NonFinite(0));
                }
                if h0 < 0.0 {
                    return Err(ParamsError::NegativeBase(h0));
                }
                if !(slope > 0.0 && slope.is_finite()) {
                    return Err(ParamsError::Slope(slope));
                }
                Ok(())
            }
        }
    }

    /// Checks that every level a graph on `n` nodes can produce, `0..n`, has
    /// a value.
    pub fn validate_for(&self, n: usize) -> Result<(), ParamsError> {
        self.validate()?;
        match self {
            RewardFunction::Table { values } if values.len() < n => {
                Err(ParamsError::TableTooShort {
                    len: values.len(),
                    needed: n,
                })
            }
            _ => Ok(()),
        }
    }

    /// Highest level with a defined value, if bounded.
    pub fn max_level(&self) -> Option<usize> {
        match self {
            RewardFunction::Table { values } => values.len().checked_sub(1),
            RewardFunction::Linear { .. } => None,
        }
    }

    /// `H(level)`.
    ///
    /// # Panics
    /// If a table does not cover `level`; [`RewardFunction::validate_for`]
    /// rules this out for every level reachable on `n` nodes.
    pub fn value(&self, level: usize) -> f64 {
        match self {
            RewardFunction::Table { values } => *values.get(level).unwrap_or_else(|| {
                panic!(
                    "reward table with {} values has no level {level}",
                    values.len()
                )
            }),
            RewardFunction::Linear { h0, slope } => h0 + slope * level as f64,
        }
    }

    pub fn try_value(&self, level: usize) -> Option<f64> {
        match self {
            RewardFunction::Table { values } => values.get(level).copied(),
            RewardFunction::Linear { .. } => Some(self.value(level)),
        }
    }

    /// `H(hi) - H(lo)`.
    pub fn increment(&self, lo: usize, hi: usize) -> f64 {
        self.value(hi) - self.value(lo)
    }
}

/// The tuple `(γ, H, c)` plus the tie tolerance used by every utility
/// comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct UtilityParams {
    gamma: f64,
    cost: f64,
    reward: RewardFunction,
    tie_tolerance: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    gamma: f64,
    cost: f64,
    reward: RewardFunction,
    #[serde(default, skip_serializing_if = "is_zero")]
    tie_tolerance: f64,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

impl TryFrom<RawParams> for UtilityParams {
    type Error = ParamsError;

    fn try_from(r: RawParams) -> Result<Self, ParamsError> {
        UtilityParams::new(r.gamma, r.cost, r.reward)?.with_tie_tolerance(r.tie_tolerance)
    }
}

impl From<UtilityParams> for RawParams {
    fn from(p: UtilityParams) -> Self {
        RawParams {
            gamma: p.gamma,
            cost: p.cost,
            reward: p.reward,
            tie_tolerance: p.tie_tolerance,
        }
    }
}

impl UtilityParams {
    pub fn new(gamma: f64, cost: f64, reward: RewardFunction) -> Result<Self, ParamsError> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(ParamsError::Gamma(gamma));
        }
        if !(cost > 0.0 && cost.is_finite()) {
            return Err(ParamsError::Cost(cost));
        }
        reward.validate()?;
        Ok(UtilityParams {
            gamma,
            cost,
            reward,
            tie_tolerance: 0.0,
        })
    }

    /// Sets the tolerance `ε` under which two utilities count as tied.
    pub fn with_tie_tolerance(mut self, eps: f64) -> Result<Self, ParamsError> {
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(ParamsError::Tolerance(eps));
        }
        self.tie_tolerance = eps;
        Ok(self)
    }

    pub fn validate_for(&self, n: usize) -> Result<(), ParamsError> {
        self.reward.validate_for(n)
    }

    pub fn from_json_str(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn cost(&self) -> f64 {
        self.cost
    }

    pub fn reward(&self) -> &RewardFunction {
        &self.reward
    }

    pub fn tie_tolerance(&self) -> f64 {
        self.tie_tolerance
    }

    /// `a > b` beyond the tie tolerance.
    pub fn strictly_greater(&self, a: f64, b: f64) -> bool {
        a - b > self.tie_tolerance
    }

    /// `a >= b` up to the tie tolerance; the exact complement of
    /// `strictly_greater(b, a)`.
    pub fn weakly_greater(&self, a: f64, b: f64) -> bool {
        !self.strictly_greater(b, a)
    }

    /// Whether `H(l+1) - H(l) > γ + c·n` for every level `l` reachable on
    /// `n` nodes, the regime in which the formation process always reaches
    /// a connected equilibrium.
    pub fn has_steep_rewards(&self, n: usize) -> bool {
        let bound = self.gamma + self.cost * n as f64;
        (0..n.saturating_sub(1)).all(|l| self.reward.increment(l, l + 1) > bound)
    }
}

/// Whether agents need the target's consent to establish an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentType {
    #[serde(alias = "non-consensual", alias = "nonconsensual")]
    NonConsensual,
    Consensual,
}

impl AgentType {
    pub const ALL: [AgentType; 2] = [AgentType::NonConsensual, AgentType::Consensual];

    pub fn as_str(self) -> &'static str {
        match self {
            AgentType::NonConsensual => "non_consensual",
            AgentType::Consensual => "consensual",
        }
    }
}

impl fmt::Display for AgentType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AgentType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "non_consensual" | "nonconsensual" => Ok(AgentType::NonConsensual),
            "consensual" => Ok(AgentType::Consensual),
            _ => Err(format!(
                "unknown agent type {s:?} (expected consensual or non-consensual)"
            )),
        }
    }
}

/// `c·Σ_{k ∈ N_in^s(i)} 1/|P_i(G, k)|`.
///
/// Terms are grouped by P-set size and summed in increasing size, so the
/// result depends only on the multiset of sizes and not on node labels.
pub fn management_cost(i: NodeId, g: &DiGraph, params: &UtilityParams) -> f64 {
    let mut by_size = [0u32; MAX_NODES + 1];
    for k in n_in_s(i, g).iter() {
        by_size[p_set_unchecked(i, k, g).len()] += 1;
    }
    let shares: f64 = by_size
        .iter()
        .enumerate()
        .filter(|&(_, &count)| count > 0)
        .map(|(size, &count)| count as f64 / size as f64)
        .sum();
    params.cost * shares
}

/// Utility of agent `i` in `g`.
pub fn utility(i: NodeId, g: &DiGraph, params: &UtilityParams) -> f64 {
    utility_with_levels(i, g, &g.levels(), params)
}

/// Utility of agent `i` given precomputed levels of `g`.
pub fn utility_with_levels(
    i: NodeId,
    g: &DiGraph,
    levels: &LevelMap,
    params: &UtilityParams,
) -> f64 {
    g.out_set(i).len() as f64 * params.gamma + params.reward.value(levels.level(i))
        - management_cost(i, g, params)
}

/// Utilities of all agents.
pub fn utilities(g: &DiGraph, params: &UtilityParams) -> Vec<f64> {
    let levels = g.levels();
    g.nodes()
        .map(|i| utility_with_levels(i, g, &levels, params))
        .collect()
}
