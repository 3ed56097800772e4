//! Canonical labeling by exhaustive permutation for small graphs.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::graph::{DiGraph, NodeId};

/// Largest `n` for which [`canonical_form`] is defined (`8! = 40320`).
pub const MAX_CANON_NODES: usize = 8;

/// Isomorphism-invariant key: the minimum pair mask over all relabelings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CanonicalForm {
    pub n: usize,
    pub mask: u64,
}

impl CanonicalForm {
    pub fn graph(&self) -> DiGraph {
        DiGraph::from_pair_mask(self.n, self.mask).expect("canonical forms hold valid n")
    }

    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        self.graph().edge_vec()
    }
}

/// Bit of `(i, j)` in [`DiGraph::pair_mask`].
fn pair_bit(n: usize, i: NodeId, j: NodeId) -> u32 {
    (i * (n - 1) + if j < i { j } else { j - 1 }) as u32
}

/// `None` when `g` has more than [`MAX_CANON_NODES`] nodes.
pub fn canonical_form(g: &DiGraph) -> Option<CanonicalForm> {
    let n = g.n();
    if n > MAX_CANON_NODES {
        return None;
    }
    let edges = g.edge_vec();
    let mask = (0..n)
        .permutations(n)
        .map(|perm| {
            edges
                .iter()
                .fold(0u64, |m, &(i, j)| m | 1 << pair_bit(n, perm[i], perm[j]))
        })
        .min()
        .unwrap_or(0);
    Some(CanonicalForm { n, mask })
}

pub fn is_isomorphic(a: &DiGraph, b: &DiGraph) -> Option<bool> {
    if a.n() != b.n() || a.edge_count() != b.edge_count() {
        return Some(false);
    }
    Some(canonical_form(a)? == canonical_form(b)?)
}
