//! Directed-graph substrate for the formation game.
//!
//! A [`DiGraph`] is a simple digraph on `n` labeled nodes (no self-loops, no
//! parallel edges). Edge `(i, j)` means `j` supervises `i` when it is a single
//! edge, and `i`/`j` collaborate when both directions are present.

mod scc;
mod structure;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use scc::{condensation, levels, Condensation, LevelMap};
pub use structure::{
    classify, is_critical_edge, is_weakly_connected, level_count, n_in, n_in_s, n_out, p_set,
    p_star, reachable_from, weak_component, weak_components, Classification,
};
pub(crate) use structure::{classify_with, critical_unchecked, p_set_unchecked};

/// Smallest node count the game is defined for.
pub const MIN_NODES: usize = 3;
/// Largest node count supported by the bitset adjacency rows.
pub const MAX_NODES: usize = 64;

pub type NodeId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("node count {0} outside supported range [{MIN_NODES}, {MAX_NODES}]")]
    NodeCount(usize),
    #[error("node {node} out of range for n = {n}")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("{k} is not a subordinate of {i}")]
    NotSubordinate { i: usize, k: usize },
    #[error("({i}, {j}) is not an undirected edge inside an undirected team")]
    NotTeamEdge { i: usize, j: usize },
    #[error("malformed graph file: {0}")]
    Parse(String),
}

/// A set of node ids stored as a 64-bit mask.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeSet(u64);

impl NodeSet {
    pub const EMPTY: NodeSet = NodeSet(0);

    pub fn singleton(i: NodeId) -> Self {
        NodeSet(1 << i)
    }

    /// The set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        if n >= 64 {
            NodeSet(u64::MAX)
        } else {
            NodeSet((1u64 << n) - 1)
        }
    }

    pub fn from_bits(bits: u64) -> Self {
        NodeSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, i: NodeId) -> bool {
        i < 64 && self.0 >> i & 1 == 1
    }

    pub fn insert(&mut self, i: NodeId) {
        self.0 |= 1 << i;
    }

    pub fn remove(&mut self, i: NodeId) {
        self.0 &= !(1 << i);
    }

    pub fn with(mut self, i: NodeId) -> Self {
        self.insert(i);
        self
    }

    pub fn without(mut self, i: NodeId) -> Self {
        self.remove(i);
        self
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: NodeSet) -> NodeSet {
        NodeSet(self.0 | other.0)
    }

    pub fn intersection(self, other: NodeSet) -> NodeSet {
        NodeSet(self.0 & other.0)
    }

    pub fn difference(self, other: NodeSet) -> NodeSet {
        NodeSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: NodeSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn first(self) -> Option<NodeId> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn iter(self) -> NodeSetIter {
        NodeSetIter(self.0)
    }

    pub fn to_vec(self) -> Vec<NodeId> {
        self.iter().collect()
    }
}

impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<NodeId> for NodeSet {
    fn from_iter<T: IntoIterator<Item = NodeId>>(iter: T) -> Self {
        let mut s = NodeSet::EMPTY;
        for i in iter {
            s.insert(i);
        }
        s
    }
}

impl IntoIterator for NodeSet {
    type Item = NodeId;
    type IntoIter = NodeSetIter;

    fn into_iter(self) -> NodeSetIter {
        self.iter()
    }
}

#[derive(Debug, Clone)]
pub struct NodeSetIter(u64);

impl Iterator for NodeSetIter {
    type Item = NodeId;

    fn next(&mut self) -> Option<NodeId> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let k = self.0.count_ones() as usize;
        (k, Some(k))
    }
}

impl ExactSizeIterator for NodeSetIter {}

/// Simple directed graph on `n` nodes.
///
/// Out- and in-adjacency are kept as bitset rows so neighborhood queries are
/// O(1) and the edge set is always the ordered-pair set encoded by `out`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DiGraph {
    n: usize,
    out: Vec<NodeSet>,
    inn: Vec<NodeSet>,
}

impl DiGraph {
    /// Empty graph on `n` nodes.
    pub fn empty(n: usize) -> Result<Self, GraphError> {
        if !(MIN_NODES..=MAX_NODES).contains(&n) {
            return Err(GraphError::NodeCount(n));
        }
        Ok(DiGraph {
            n,
            out: vec![NodeSet::EMPTY; n],
            inn: vec![NodeSet::EMPTY; n],
        })
    }

    /// Complete graph: every pair joined by an undirected edge.
    pub fn complete(n: usize) -> Result<Self, GraphError> {
        let mut g = Self::empty(n)?;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    g.insert_unchecked(i, j);
                }
            }
        }
        Ok(g)
    }

    /// Builds a graph from an edge list, rejecting self-loops, duplicates and
    /// out-of-range ids.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut g = Self::empty(n)?;
        for (i, j) in edges {
            g.check_pair(i, j)?;
            if g.has_edge(i, j) {
                return Err(GraphError::DuplicateEdge(i, j));
            }
            g.insert_unchecked(i, j);
        }
        Ok(g)
    }

    /// Decodes a graph from a bitmask over the ordered pairs in
    /// [`DiGraph::ordered_pairs`] order (bit `k` set means pair `k` present).
    pub fn from_pair_mask(n: usize, mask: u64) -> Result<Self, GraphError> {
        let mut g = Self::empty(n)?;
        for (k, (i, j)) in Self::ordered_pairs(n).enumerate() {
            if mask >> k & 1 == 1 {
                g.insert_unchecked(i, j);
            }
        }
        Ok(g)
    }

    /// All ordered pairs `(i, j)`, `i != j`, in lexicographic order.
    pub fn ordered_pairs(n: usize) -> impl Iterator<Item = (NodeId, NodeId)> + Clone {
        (0..n).flat_map(move |i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> std::ops::Range<NodeId> {
        0..self.n
    }

    pub fn all_nodes(&self) -> NodeSet {
        NodeSet::full(self.n)
    }

    pub fn has_edge(&self, i: NodeId, j: NodeId) -> bool {
        self.out[i].contains(j)
    }

    /// Both `(i, j)` and `(j, i)` present.
    pub fn is_undirected(&self, i: NodeId, j: NodeId) -> bool {
        self.has_edge(i, j) && self.has_edge(j, i)
    }

    pub fn out_set(&self, i: NodeId) -> NodeSet {
        self.out[i]
    }

    pub fn in_set(&self, i: NodeId) -> NodeSet {
        self.inn[i]
    }

    /// Nodes joined to `i` by an undirected edge.
    pub fn collaborators(&self, i: NodeId) -> NodeSet {
        self.out[i].intersection(self.inn[i])
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(|s| s.len()).sum()
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(i, s)| s.iter().map(move |j| (i, j)))
    }

    pub fn edge_vec(&self) -> Vec<(NodeId, NodeId)> {
        self.edges().collect()
    }

    /// Inverse of [`DiGraph::from_pair_mask`]. Only defined for `n <= 8`.
    pub fn pair_mask(&self) -> u64 {
        debug_assert!(self.n <= 8);
        let mut mask = 0u64;
        for (k, (i, j)) in Self::ordered_pairs(self.n).enumerate() {
            if self.has_edge(i, j) {
                mask |= 1 << k;
            }
        }
        mask
    }

    /// Adds `(i, j)`; returns whether the edge was newly inserted.
    pub fn add_edge(&mut self, i: NodeId, j: NodeId) -> Result<bool, GraphError> {
        self.check_pair(i, j)?;
        let fresh = !self.has_edge(i, j);
        self.insert_unchecked(i, j);
        Ok(fresh)
    }

    /// Removes `(i, j)`; returns whether the edge was present.
    pub fn remove_edge(&mut self, i: NodeId, j: NodeId) -> Result<bool, GraphError> {
        self.check_pair(i, j)?;
        let present = self.has_edge(i, j);
        self.out[i].remove(j);
        self.inn[j].remove(i);
        Ok(present)
    }

    /// `G + ij` (or `G - ij` if present): the graph with `(i, j)` toggled.
    pub fn toggled(&self, i: NodeId, j: NodeId) -> DiGraph {
        let mut g = self.clone();
        if g.has_edge(i, j) {
            g.out[i].remove(j);
            g.inn[j].remove(i);
        } else {
            g.insert_unchecked(i, j);
        }
        g
    }

    /// `G + ij`.
    pub fn with_edge(&self, i: NodeId, j: NodeId) -> DiGraph {
        let mut g = self.clone();
        g.insert_unchecked(i, j);
        g
    }

    /// `G - ij`.
    pub fn without_edge(&self, i: NodeId, j: NodeId) -> DiGraph {
        let mut g = self.clone();
        g.out[i].remove(j);
        g.inn[j].remove(i);
        g
    }

    /// Relabels nodes: node `i` becomes `perm[i]`.
    pub fn relabeled(&self, perm: &[NodeId]) -> DiGraph {
        let mut g = DiGraph {
            n: self.n,
            out: vec![NodeSet::EMPTY; self.n],
            inn: vec![NodeSet::EMPTY; self.n],
        };
        for (i, j) in self.edges() {
            g.insert_unchecked(perm[i], perm[j]);
        }
        g
    }

    pub fn check_node(&self, i: NodeId) -> Result<(), GraphError> {
        if i >= self.n {
            return Err(GraphError::NodeOutOfRange { node: i, n: self.n });
        }
        Ok(())
    }

    fn check_pair(&self, i: NodeId, j: NodeId) -> Result<(), GraphError> {
        self.check_node(i)?;
        self.check_node(j)?;
        if i == j {
            return Err(GraphError::SelfLoop(i));
        }
        Ok(())
    }

    fn insert_unchecked(&mut self, i: NodeId, j: NodeId) {
        self.out[i].insert(j);
        self.inn[j].insert(i);
    }

    /// Parses the `{"n": .., "edges": [[i, j], ..]}` file format.
    pub fn from_json_str(s: &str) -> Result<Self, GraphError> {
        let file: GraphFile =
            serde_json::from_str(s).map_err(|e| GraphError::Parse(e.to_string()))?;
        file.try_into()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&GraphFile::from(self)).expect("graph serializes")
    }

    /// Graphviz rendering: single edges as arrows, undirected pairs as one
    /// dashed edge without arrowheads.
    pub fn to_dot(&self, name: &str) -> String {
        let mut s = format!("digraph \"{}\" {{\n", name.replace('"', "'"));
        for i in self.nodes() {
            s.push_str(&format!("  {i};\n"));
        }
        for (i, j) in self.edges() {
            if self.has_edge(j, i) {
                if i < j {
                    s.push_str(&format!(
                        "  {i} -> {j} [dir=none, style=dashed, color=blue];\n"
                    ));
                }
            } else {
                s.push_str(&format!("  {i} -> {j};\n"));
            }
        }
        s.push_str("}\n");
        s
    }
}

impl fmt::Debug for DiGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiGraph(n={}, {:?})", self.n, self.edge_vec())
    }
}

/// On-disk graph representation.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<(NodeId, NodeId)>,
}

impl From<&DiGraph> for GraphFile {
    fn from(g: &DiGraph) -> Self {
        GraphFile {
            n: g.n,
            edges: g.edge_vec(),
        }
    }
}

impl TryFrom<GraphFile> for DiGraph {
    type Error = GraphError;

    fn try_from(f: GraphFile) -> Result<Self, GraphError> {
        DiGraph::from_edges(f.n, f.edges)
    }
}

impl Serialize for DiGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GraphFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for DiGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let f = GraphFile::deserialize(d)?;
        DiGraph::try_from(f).map_err(serde::de::Error::custom)
    }
}
