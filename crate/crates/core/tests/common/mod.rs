//! Definition-level reference implementations. These use plain edge sets and
//! exhaustive search, sharing nothing with the library beyond `DiGraph`.

#![allow(dead_code)]

use std::collections::BTreeSet;

use hiernet::graph::DiGraph;
use hiernet::payoff::{AgentType, UtilityParams};

pub type Edges = BTreeSet<(usize, usize)>;

pub fn edges(g: &DiGraph) -> Edges {
    (0..g.n())
        .flat_map(|i| (0..g.n()).map(move |j| (i, j)))
        .filter(|&(i, j)| g.has_edge(i, j))
        .collect()
}

/// `reach[i][j]`: a directed path of length >= 0 from `i` to `j`.
pub fn reachability(n: usize, e: &Edges) -> Vec<Vec<bool>> {
    let mut r = vec![vec![false; n]; n];
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(i, j) in e {
        r[i][j] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if r[i][k] && r[k][j] {
                    r[i][j] = true;
                }
            }
        }
    }
    r
}

/// Strong components as the sorted node lists of mutual reachability classes.
pub fn sccs(n: usize, e: &Edges) -> Vec<Vec<usize>> {
    let r = reachability(n, e);
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for i in 0..n {
        if seen[i] {
            continue;
        }
        let comp: Vec<usize> = (0..n).filter(|&j| r[i][j] && r[j][i]).collect();
        for &j in &comp {
            seen[j] = true;
        }
        out.push(comp);
    }
    out
}

/// Longest path, in arcs, ending at each node's component, found by
/// enumerating every simple path of the component graph.
pub fn levels(n: usize, e: &Edges) -> Vec<usize> {
    let comps = sccs(n, e);
    let comp_of = |v: usize| comps.iter().position(|c| c.contains(&v)).unwrap();
    let m = comps.len();
    let mut adj = vec![BTreeSet::new(); m];
    for &(i, j) in e {
        let (a, b) = (comp_of(i), comp_of(j));
        if a != b {
            adj[a].insert(b);
        }
    }
    let mut best = vec![0usize; m];
    fn walk(v: usize, len: usize, adj: &[BTreeSet<usize>], on: &mut Vec<bool>, best: &mut [usize]) {
        best[v] = best[v].max(len);
        for &w in &adj[v] {
            if !on[w] {
                on[w] = true;
                walk(w, len + 1, adj, on, best);
                on[w] = false;
            }
        }
    }
    for s in 0..m {
        let mut on = vec![false; m];
        on[s] = true;
        walk(s, 0, &adj, &mut on, &mut best);
    }
    (0..n).map(|v| best[comp_of(v)]).collect()
}

pub fn subordinates(i: usize, e: &Edges) -> Vec<usize> {
    e.iter()
        .filter(|&&(k, t)| t == i && !e.contains(&(i, k)))
        .map(|&(k, _)| k)
        .collect()
}

pub fn p_set(i: usize, k: usize, n: usize, e: &Edges) -> BTreeSet<usize> {
    let mut p: BTreeSet<usize> = (0..n)
        .filter(|&j| e.contains(&(k, j)) && e.contains(&(i, j)) && e.contains(&(j, i)))
        .collect();
    p.insert(i);
    p
}

pub fn utility(i: usize, n: usize, e: &Edges, params: &UtilityParams) -> f64 {
    let out = e.iter().filter(|&&(a, _)| a == i).count() as f64;
    let level = levels(n, e)[i];
    let cost: f64 = subordinates(i, e)
        .into_iter()
        .map(|k| params.cost() / p_set(i, k, n, e).len() as f64)
        .sum();
    out * params.gamma() + params.reward().value(level) - cost
}

fn toggled(e: &Edges, pair: (usize, usize)) -> Edges {
    let mut e2 = e.clone();
    if !e2.remove(&pair) {
        e2.insert(pair);
    }
    e2
}

/// Equilibrium requirements checked pair by pair with exact comparisons.
pub fn is_equilibrium(n: usize, e: &Edges, params: &UtilityParams, agent_type: AgentType) -> bool {
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            let e2 = toggled(e, (i, j));
            let stays = utility(i, n, e, params) > utility(i, n, &e2, params);
            if e.contains(&(i, j)) || agent_type == AgentType::NonConsensual {
                if !stays {
                    return false;
                }
            } else if !stays && utility(j, n, e, params) <= utility(j, n, &e2, params) {
                return false;
            }
        }
    }
    true
}

pub fn has_directed_cycle(n: usize, e: &Edges) -> bool {
    let r = reachability(n, e);
    e.iter().any(|&(i, j)| !e.contains(&(j, i)) && r[j][i])
}

pub fn weak_components(n: usize, e: &Edges) -> Vec<Vec<usize>> {
    let sym: Edges = e.iter().flat_map(|&(i, j)| [(i, j), (j, i)]).collect();
    sccs(n, &sym)
}
