//! Hierarchical network formation: graphs, utilities, equilibria and the
//! random-pair formation process.

pub mod canon;
pub mod crossval;
pub mod dynamics;
pub mod equilibrium;
pub mod graph;
pub mod grid;
pub mod payoff;
