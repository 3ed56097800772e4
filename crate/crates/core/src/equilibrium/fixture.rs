use thiserror::Error;

use crate::graph::{DiGraph, MAX_NODES};
use crate::payoff::{RewardFunction, UtilityParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FixtureError {
    #[error("need at least two levels, got {0}")]
    TooFewLevels(usize),
    #[error("team at level {level} has size {size}; every team needs more than two members")]
    TeamTooSmall { level: usize, size: usize },
    #[error("copies must be at least 1")]
    NoCopies,
    #[error("with several copies, team sizes must not shrink going up from level 1 (level {level}: {size} < {below})")]
    ShrinkingTeams {
        level: usize,
        size: usize,
        below: usize,
    },
    #[error("{0} nodes exceed the supported maximum")]
    TooLarge(usize),
    #[error("no parameters fit: level gaps must total below c while each exceeds γ + c·{0:.4}")]
    Infeasible(f64),
}

/// Builds `copies` isolated layered structures and utility parameters under
/// which the result is an equilibrium for consensual agents.
///
/// `sizes[l]` is the size of the complete team at level `l` (bottom first).
/// Every member of the team at level `l` has a single edge to every member
/// of the team at level `l + 1`; there are no other edges.
///
/// Parameters use `c = 1`. With `k` levels and
/// `U = max_l (s_l + s_{l-1}) / (s_l (s_l + 1))`, they set
/// `γ = (1 − (k−1)U) / (10(k−1))`, level gaps `(1 − 2γ)/(k−1)` inside the
/// structure and gaps `γ` above it, so every gap exceeds `γ + U` while
/// `H(k) − H(0) < c`. A single copy with `(k−1)U >= 1` falls back to
/// `γ = 0.05` and gaps `γ + U + 0.5` (no upper bound applies without a
/// second copy).
pub fn layered_teams_fixture(
    sizes: &[usize],
    copies: usize,
) -> Result<(DiGraph, UtilityParams), FixtureError> {
    let k = sizes.len();
    if k < 2 {
        return Err(FixtureError::TooFewLevels(k));
    }
    if copies == 0 {
        return Err(FixtureError::NoCopies);
    }
    if let Some((level, &size)) = sizes.iter().enumerate().find(|&(_, &s)| s <= 2) {
        return Err(FixtureError::TeamTooSmall { level, size });
    }
    if copies > 1 {
        for level in 2..k {
            if sizes[level] < sizes[level - 1] {
                return Err(FixtureError::ShrinkingTeams {
                    level,
                    size: sizes[level],
                    below: sizes[level - 1],
                });
            }
        }
    }
    let per_copy: usize = sizes.iter().sum();
    let n = per_copy * copies;
    if n > MAX_NODES {
        return Err(FixtureError::TooLarge(n));
    }

    let mut edges = Vec::new();
    for copy in 0..copies {
        let mut start = copy * per_copy;
        let mut teams = Vec::with_capacity(k);
        for &s in sizes {
            teams.push(start..start + s);
            start += s;
        }
        for team in &teams {
            for a in team.clone() {
                for b in team.clone().filter(|&b| b != a) {
                    edges.push((a, b));
                }
            }
        }
        for w in teams.windows(2) {
            for a in w[0].clone() {
                for b in w[1].clone() {
                    edges.push((a, b));
                }
            }
        }
    }
    let g = DiGraph::from_edges(n, edges).expect("fixture edges are simple");

    let cost = 1.0;
    let spread = (1..k)
        .map(|l| {
            let (hi, lo) = (sizes[l] as f64, sizes[l - 1] as f64);
            (hi + lo) / (hi * (hi + 1.0))
        })
        .fold(0.0, f64::max);
    let steps = (k - 1) as f64;
    let (gamma, inner_gap, outer_gap) = if steps * spread < 1.0 {
        let gamma = cost * (1.0 - steps * spread) / (10.0 * steps);
        (gamma, (cost - 2.0 * gamma) / steps, gamma)
    } else if copies == 1 {
        let gamma = 0.05 * cost;
        let gap = gamma + cost * spread + 0.5 * cost;
        (gamma, gap, gap)
    } else {
        return Err(FixtureError::Infeasible(spread));
    };
    let mut values = Vec::with_capacity(n);
    let mut h = 0.0;
    for level in 0..n {
        values.push(h);
        h += if level + 1 < k { inner_gap } else { outer_gap };
    }
    let reward = RewardFunction::table(values).expect("gaps are positive");
    let params = UtilityParams::new(gamma, cost, reward).expect("gamma and cost are positive");
    Ok((g, params))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_three_single_copy() {
        let (g, p) = layered_teams_fixture(&[3, 3], 1).unwrap();
        assert_eq!(g.n(), 6);
        assert_eq!(g.edge_count(), 6 + 6 + 9);
        assert!((p.gamma() - 0.05).abs() < 1e-12);
        assert_eq!(p.cost(), 1.0);
        assert!((p.reward().increment(0, 1) - 0.9).abs() < 1e-12);
        assert!(p.reward().increment(0, 2) < p.cost());
        assert_eq!(g.levels().as_slice(), &[0, 0, 0, 1, 1, 1]);
    }

    #[test]
    fn copies_are_isolated() {
        let (g, _) = layered_teams_fixture(&[3, 3], 2).unwrap();
        assert_eq!(g.n(), 12);
        assert_eq!(crate::graph::weak_components(&g).len(), 2);
    }

    #[test]
    fn rejects_small_teams_and_bad_shapes() {
        assert_eq!(
            layered_teams_fixture(&[3, 2], 1).unwrap_err(),
            FixtureError::TeamTooSmall { level: 1, size: 2 }
        );
        assert_eq!(
            layered_teams_fixture(&[3], 1).unwrap_err(),
            FixtureError::TooFewLevels(1)
        );
        assert_eq!(
            layered_teams_fixture(&[3, 3], 0).unwrap_err(),
            FixtureError::NoCopies
        );
        assert!(matches!(
            layered_teams_fixture(&[3, 5, 4], 2),
            Err(FixtureError::ShrinkingTeams { level: 2, .. })
        ));
        // level-0 team much larger than level 1: spread > 1
        assert!(matches!(
            layered_teams_fixture(&[12, 3], 2),
            Err(FixtureError::Infeasible(_))
        ));
        assert!(layered_teams_fixture(&[12, 3], 1).is_ok());
    }
}
