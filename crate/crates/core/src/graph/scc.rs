use std::collections::BTreeSet;

use super::{DiGraph, NodeId, NodeSet};

/// The condensation `C(G)`: strongly connected components contracted to
/// single vertices.
///
/// Components are indexed in topological order, so every DAG edge `(a, b)`
/// has `a < b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condensation {
    scc_of: Vec<usize>,
    members: Vec<NodeSet>,
    dag_edges: BTreeSet<(usize, usize)>,
}

impl Condensation {
    pub fn component_count(&self) -> usize {
        self.members.len()
    }

    pub fn scc_of(&self, i: NodeId) -> usize {
        self.scc_of[i]
    }

    pub fn members(&self, component: usize) -> NodeSet {
        self.members[component]
    }

    /// Members of the component containing `i`.
    pub fn team_of(&self, i: NodeId) -> NodeSet {
        self.members[self.scc_of[i]]
    }

    pub fn dag_edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.dag_edges
    }

    pub fn same_component(&self, i: NodeId, j: NodeId) -> bool {
        self.scc_of[i] == self.scc_of[j]
    }
}

/// Tarjan's algorithm, iterative so deep chains cannot overflow the stack.
pub fn condensation(g: &DiGraph) -> Condensation {
    const UNVISITED: usize = usize::MAX;
    let n = g.n();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<NodeId> = Vec::with_capacity(n);
    let mut next_index = 0;
    // Components come out in reverse topological order.
    let mut found: Vec<NodeSet> = Vec::new();

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        // (node, successors not yet explored)
        let mut call: Vec<(NodeId, NodeSet)> = vec![(root, g.out_set(root))];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pending)) = call.last_mut() {
            if let Some(w) = pending.first() {
                pending.remove(w);
                if index[w] == UNVISITED {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, g.out_set(w)));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = NodeSet::EMPTY;
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    comp.insert(w);
                    if w == v {
                        break;
                    }
                }
                found.push(comp);
            }
        }
    }

    found.reverse();
    let mut scc_of = vec![0; n];
    for (c, members) in found.iter().enumerate() {
        for i in members.iter() {
            scc_of[i] = c;
        }
    }
    let dag_edges = g
        .edges()
        .filter_map(|(i, j)| {
            let (a, b) = (scc_of[i], scc_of[j]);
            (a != b).then_some((a, b))
        })
        .collect();
    Condensation {
        scc_of,
        members: found,
        dag_edges,
    }
}

/// Level of every node: the longest arc count in the condensation from any
/// source component to the node's component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelMap {
    level_of: Vec<usize>,
}

impl LevelMap {
    pub fn level(&self, i: NodeId) -> usize {
        self.level_of[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.level_of
    }

    pub fn max_level(&self) -> usize {
        self.level_of.iter().copied().max().unwrap_or(0)
    }

    /// Number of distinct levels, `max_level + 1`.
    pub fn level_span(&self) -> usize {
        self.max_level() + 1
    }

    /// `q_l(G)`: number of nodes at level `l`.
    pub fn count_at(&self, level: usize) -> usize {
        self.level_of.iter().filter(|&&l| l == level).count()
    }

    /// Number of nodes strictly below `level`.
    pub fn count_below(&self, level: usize) -> usize {
        self.level_of.iter().filter(|&&l| l < level).count()
    }

    pub fn nodes_at(&self, level: usize) -> NodeSet {
        self.level_of
            .iter()
            .enumerate()
            .filter(|&(_, &l)| l == level)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Longest-path DP over the topological order of the condensation.
pub fn levels(c: &Condensation) -> LevelMap {
    let mut comp_level = vec![0usize; c.component_count()];
    // dag_edges is sorted by source component, which is topological.
    for &(a, b) in c.dag_edges() {
        comp_level[b] = comp_level[b].max(comp_level[a] + 1);
    }
    LevelMap {
        level_of: c.scc_of.iter().map(|&comp| comp_level[comp]).collect(),
    }
}

impl DiGraph {
    pub fn condensation(&self) -> Condensation {
        condensation(self)
    }

    pub fn levels(&self) -> LevelMap {
        levels(&condensation(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Team {0, 1} above 3 and below 2.
    fn pair_team() -> DiGraph {
        DiGraph::from_edges(4, [(1, 0), (3, 0), (0, 1), (3, 1), (0, 2)]).unwrap()
    }

    #[test]
    fn empty_graph_has_singletons() {
        let g = DiGraph::empty(3).unwrap();
        let c = condensation(&g);
        assert_eq!(c.component_count(), 3);
        assert!(c.dag_edges().is_empty());
        assert_eq!(levels(&c).as_slice(), &[0, 0, 0]);
    }

    #[test]
    fn undirected_pair_with_subordinate() {
        // {ij, ji, ik}
        let g = DiGraph::from_edges(3, [(0, 1), (1, 0), (0, 2)]).unwrap();
        let c = condensation(&g);
        assert_eq!(c.component_count(), 2);
        assert_eq!(c.team_of(0).to_vec(), vec![0, 1]);
        assert_eq!(c.team_of(2).to_vec(), vec![2]);
        let dag: Vec<_> = c.dag_edges().iter().copied().collect();
        assert_eq!(dag, vec![(c.scc_of(0), c.scc_of(2))]);
    }

    #[test]
    fn complete_graph_is_one_component() {
        let c = condensation(&DiGraph::complete(3).unwrap());
        assert_eq!(c.component_count(), 1);
        assert!(c.dag_edges().is_empty());
    }

    #[test]
    fn pair_team_levels() {
        let l = pair_team().levels();
        assert_eq!(l.as_slice(), &[1, 1, 2, 0]);
        assert_eq!((l.count_at(0), l.count_at(1), l.count_at(2)), (1, 2, 1));
    }

    #[test]
    fn chain_levels() {
        let g = DiGraph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(g.levels().as_slice(), &[0, 1, 2]);
    }

    #[test]
    fn long_chain_does_not_recurse() {
        let n = 64;
        let g = DiGraph::from_edges(n, (0..n - 1).map(|i| (i, i + 1))).unwrap();
        assert_eq!(g.levels().level(n - 1), n - 1);
        let cyc = DiGraph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap();
        assert_eq!(condensation(&cyc).component_count(), 1);
    }
}
