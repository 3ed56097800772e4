//! Neighborhoods, P-sets and structural predicates.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{condensation, levels, Condensation, DiGraph, GraphError, LevelMap, NodeId, NodeSet};

/// `N_in(i, G)`: nodes with an edge into `i`.
pub fn n_in(i: NodeId, g: &DiGraph) -> NodeSet {
    g.in_set(i)
}

/// `N_out(i, G)`: nodes `i` points to.
pub fn n_out(i: NodeId, g: &DiGraph) -> NodeSet {
    g.out_set(i)
}

/// `N_in^s(i, G)`: the subordinates of `i` (in-neighbors that are not
/// collaborators).
pub fn n_in_s(i: NodeId, g: &DiGraph) -> NodeSet {
    g.in_set(i).difference(g.out_set(i))
}

/// `P_i(G, k)`: `i` together with its collaborators that also supervise `k`.
///
/// Fails if `k` is not a subordinate of `i`.
pub fn p_set(i: NodeId, k: NodeId, g: &DiGraph) -> Result<NodeSet, GraphError> {
    g.check_node(i)?;
    g.check_node(k)?;
    if !n_in_s(i, g).contains(k) {
        return Err(GraphError::NotSubordinate { i, k });
    }
    Ok(p_set_unchecked(i, k, g))
}

pub(crate) fn p_set_unchecked(i: NodeId, k: NodeId, g: &DiGraph) -> NodeSet {
    g.collaborators(i).intersection(g.out_set(k)).with(i)
}

/// `P_i(G)`: intersection of `P_i(G, k)` over all subordinates `k`.
///
/// With no subordinates the result is `i` plus all of its collaborators.
pub fn p_star(i: NodeId, g: &DiGraph) -> NodeSet {
    let subs = n_in_s(i, g);
    if subs.is_empty() {
        return g.collaborators(i).with(i);
    }
    subs.iter()
        .map(|k| p_set_unchecked(i, k, g))
        .fold(NodeSet::full(g.n()), NodeSet::intersection)
}

/// Weakly connected component containing `i`.
pub fn weak_component(i: NodeId, g: &DiGraph) -> NodeSet {
    let mut seen = NodeSet::singleton(i);
    let mut frontier = seen;
    while !frontier.is_empty() {
        let mut next = NodeSet::EMPTY;
        for v in frontier {
            next = next.union(g.out_set(v)).union(g.in_set(v));
        }
        frontier = next.difference(seen);
        seen = seen.union(frontier);
    }
    seen
}

pub fn is_weakly_connected(g: &DiGraph) -> bool {
    weak_component(0, g) == g.all_nodes()
}

/// All weakly connected components, ordered by smallest member.
pub fn weak_components(g: &DiGraph) -> Vec<NodeSet> {
    let mut left = g.all_nodes();
    let mut out = Vec::new();
    while let Some(i) = left.first() {
        let comp = weak_component(i, g);
        left = left.difference(comp);
        out.push(comp);
    }
    out
}

/// Nodes reachable from `i` by a directed path (including `i`).
pub fn reachable_from(i: NodeId, g: &DiGraph) -> NodeSet {
    let mut seen = NodeSet::singleton(i);
    let mut frontier = seen;
    while !frontier.is_empty() {
        let mut next = NodeSet::EMPTY;
        for v in frontier {
            next = next.union(g.out_set(v));
        }
        frontier = next.difference(seen);
        seen = seen.union(frontier);
    }
    seen
}

/// True if every edge inside `i`'s team (strongly connected component) is
/// undirected.
fn team_is_undirected(team: NodeSet, g: &DiGraph) -> bool {
    team.iter()
        .all(|v| g.out_set(v).intersection(team).is_subset(g.in_set(v)))
}

/// Whether the undirected edge `ij, ji` is critical: severing the single
/// direction `(i, j)` splits `i`'s team.
///
/// Requires both directions present and `i`'s team to contain only
/// undirected edges. On complete teams this holds exactly for two-member
/// teams.
pub fn is_critical_edge(i: NodeId, j: NodeId, g: &DiGraph) -> Result<bool, GraphError> {
    g.check_node(i)?;
    g.check_node(j)?;
    if i == j || !g.is_undirected(i, j) {
        return Err(GraphError::NotTeamEdge { i, j });
    }
    let team = condensation(g).team_of(i);
    if !team_is_undirected(team, g) {
        return Err(GraphError::NotTeamEdge { i, j });
    }
    Ok(critical_unchecked(i, j, g, team))
}

pub(crate) fn critical_unchecked(i: NodeId, j: NodeId, g: &DiGraph, team: NodeSet) -> bool {
    // In G - ij the team stays whole iff j can still reach i and i can still
    // reach j; with all team edges undirected, the first direction is enough.
    let cut = g.without_edge(i, j);
    !team.is_subset(reachable_from(i, &cut))
}

/// `q_l(G)`: number of nodes at level `l`.
pub fn level_count(level: usize, g: &DiGraph) -> usize {
    g.levels().count_at(level)
}

/// Structural summary of a graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub is_weakly_connected: bool,
    /// Some single edge lies on a cycle.
    pub has_directed_cycle: bool,
    pub is_hierarchical_structure: bool,
    pub is_sequential_hierarchy: bool,
    /// Number of levels, `max level + 1`.
    pub level_span: usize,
    pub levels: Vec<usize>,
    /// Level -> number of teams (strong components) at that level.
    pub components_per_level: BTreeMap<usize, usize>,
    /// Every team is a complete subgraph.
    pub all_components_complete: bool,
    pub teams: Vec<Vec<NodeId>>,
}

pub fn classify(g: &DiGraph) -> Classification {
    let c = condensation(g);
    let l = levels(&c);
    classify_with(g, &c, &l)
}

pub(crate) fn classify_with(g: &DiGraph, c: &Condensation, l: &LevelMap) -> Classification {
    let connected = is_weakly_connected(g);
    let has_directed_cycle = g
        .edges()
        .any(|(i, j)| !g.has_edge(j, i) && c.same_component(i, j));

    let mut components_per_level = BTreeMap::new();
    for comp in 0..c.component_count() {
        let rep = c.members(comp).first().expect("components are nonempty");
        *components_per_level.entry(l.level(rep)).or_insert(0) += 1;
    }
    let all_components_complete = (0..c.component_count()).all(|comp| {
        let m = c.members(comp);
        m.iter().all(|v| m.without(v).is_subset(g.collaborators(v)))
    });

    let is_hierarchical_structure = connected && !has_directed_cycle;
    let is_sequential_hierarchy = is_hierarchical_structure
        && components_per_level.values().all(|&k| k == 1)
        && g.nodes().all(|i| {
            g.nodes()
                .filter(|&j| l.level(i) < l.level(j))
                .all(|j| g.has_edge(i, j))
        });

    Classification {
        is_weakly_connected: connected,
        has_directed_cycle,
        is_hierarchical_structure,
        is_sequential_hierarchy,
        level_span: l.level_span(),
        levels: l.as_slice().to_vec(),
        components_per_level,
        all_components_complete,
        teams: (0..c.component_count())
            .map(|comp| c.members(comp).to_vec())
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const I: usize = 0;
    const J: usize = 1;
    const K: usize = 2;
    const M: usize = 3;

    fn pair_team() -> DiGraph {
        DiGraph::from_edges(4, [(J, I), (M, I), (I, J), (M, J), (I, K)]).unwrap()
    }

    fn set(v: &[usize]) -> NodeSet {
        v.iter().copied().collect()
    }

    #[test]
    fn pair_team_neighborhoods() {
        let g = pair_team();
        assert_eq!(n_in(I, &g), set(&[J, M]));
        assert_eq!(n_in(J, &g), set(&[I, M]));
        assert_eq!(n_in_s(I, &g), set(&[M]));
        assert_eq!(n_in_s(J, &g), set(&[M]));
        assert_eq!(n_in(K, &g), set(&[I]));
        assert_eq!(n_in_s(K, &g), set(&[I]));
    }

    #[test]
    fn pair_team_p_sets() {
        let g = pair_team();
        assert_eq!(p_set(I, M, &g).unwrap(), set(&[I, J]));
        assert_eq!(p_set(J, M, &g).unwrap(), set(&[I, J]));
        assert_eq!(p_star(I, &g), set(&[I, J]));
        assert_eq!(p_star(J, &g), set(&[I, J]));
        assert_eq!(p_set(K, I, &g).unwrap(), set(&[K]));
        assert_eq!(
            p_set(I, K, &g).unwrap_err(),
            GraphError::NotSubordinate { i: I, k: K }
        );
    }

    #[test]
    fn empty_graph_neighborhoods() {
        let g = DiGraph::empty(3).unwrap();
        for i in g.nodes() {
            assert!(n_in(i, &g).is_empty());
            assert!(n_out(i, &g).is_empty());
            assert!(n_in_s(i, &g).is_empty());
            assert_eq!(p_star(i, &g), NodeSet::singleton(i));
        }
    }

    #[test]
    fn collaborators_are_not_subordinates() {
        let g = DiGraph::from_edges(3, [(0, 1), (1, 0)]).unwrap();
        assert!(n_in_s(0, &g).is_empty());
        assert_eq!(n_in(0, &g), set(&[1]));
    }

    #[test]
    fn p_set_base_case() {
        let g = DiGraph::from_edges(3, [(1, 0)]).unwrap();
        assert_eq!(p_set(0, 1, &g).unwrap(), set(&[0]));
    }

    #[test]
    fn p_star_intersects() {
        // i=0 collaborates with a=1 and b=2; subordinate 3 is supervised by
        // {0, 1}, subordinate 4 by {0, 2}.
        let g = DiGraph::from_edges(
            5,
            [
                (0, 1),
                (1, 0),
                (0, 2),
                (2, 0),
                (3, 0),
                (3, 1),
                (4, 0),
                (4, 2),
            ],
        )
        .unwrap();
        assert_eq!(p_set(0, 3, &g).unwrap(), set(&[0, 1]));
        assert_eq!(p_set(0, 4, &g).unwrap(), set(&[0, 2]));
        assert_eq!(p_star(0, &g), set(&[0]));
    }

    #[test]
    fn weak_components_basic() {
        let g = DiGraph::empty(3).unwrap();
        assert_eq!(weak_components(&g).len(), 3);
        assert!(!is_weakly_connected(&g));
        assert!(is_weakly_connected(&pair_team()));
        assert_eq!(weak_component(K, &pair_team()), NodeSet::full(4));
        let two_pairs = DiGraph::from_edges(4, [(0, 1), (1, 0), (2, 3), (3, 2)]).unwrap();
        let comps = weak_components(&two_pairs);
        assert_eq!(comps, vec![set(&[0, 1]), set(&[2, 3])]);
    }

    #[test]
    fn critical_edges() {
        let pair = DiGraph::from_edges(3, [(0, 1), (1, 0)]).unwrap();
        assert!(is_critical_edge(0, 1, &pair).unwrap());
        assert!(is_critical_edge(1, 0, &pair).unwrap());

        let tri = DiGraph::complete(3).unwrap();
        for (i, j) in tri.edges() {
            assert!(!is_critical_edge(i, j, &tri).unwrap());
        }
        let k4 = DiGraph::complete(4).unwrap();
        assert!(k4
            .edges()
            .all(|(i, j)| !is_critical_edge(i, j, &k4).unwrap()));

        // undirected path 0-1-2: both ties are bridges of the team
        let path = DiGraph::from_edges(3, [(0, 1), (1, 0), (1, 2), (2, 1)]).unwrap();
        assert!(is_critical_edge(0, 1, &path).unwrap());
        assert!(is_critical_edge(1, 2, &path).unwrap());

        assert!(is_critical_edge(0, 2, &pair).is_err());
        // team containing a single edge
        let mixed = DiGraph::from_edges(3, [(0, 1), (1, 0), (1, 2), (2, 0)]).unwrap();
        assert!(is_critical_edge(0, 1, &mixed).is_err());
    }

    #[test]
    fn classify_complete() {
        let c = classify(&DiGraph::complete(4).unwrap());
        assert!(c.is_hierarchical_structure && c.is_sequential_hierarchy);
        assert_eq!(c.level_span, 1);
        assert!(c.all_components_complete);
    }

    #[test]
    fn classify_pair_team() {
        let c = classify(&pair_team());
        assert!(c.is_hierarchical_structure);
        assert!(!c.has_directed_cycle);
        assert!(!c.is_sequential_hierarchy);
        assert_eq!(
            c.components_per_level.values().copied().collect::<Vec<_>>(),
            [1, 1, 1]
        );
    }

    #[test]
    fn classify_disconnected_and_cyclic() {
        let two = DiGraph::from_edges(
            6,
            DiGraph::complete(3)
                .unwrap()
                .edges()
                .flat_map(|(i, j)| [(i, j), (i + 3, j + 3)]),
        )
        .unwrap();
        let c = classify(&two);
        assert!(!c.is_weakly_connected && !c.is_hierarchical_structure);
        assert!(c.all_components_complete);

        let cyc = DiGraph::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let c = classify(&cyc);
        assert!(c.has_directed_cycle && !c.is_hierarchical_structure);
    }

    #[test]
    fn chain_with_shortcut_is_sequential() {
        let g = DiGraph::from_edges(3, [(0, 1), (0, 2), (1, 2)]).unwrap();
        assert!(classify(&g).is_sequential_hierarchy);
        let chain = DiGraph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert!(!classify(&chain).is_sequential_hierarchy);
        assert_eq!(level_count(1, &chain), 1);
    }
}
