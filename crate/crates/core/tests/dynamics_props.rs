use std::collections::BTreeSet;

use hiernet::dynamics::{
    batch, run, step, BatchSeeds, Decision, InitialGraph, PairSelector, ProcessState, RunConfig,
    RunResult, TraceEvent,
};
use hiernet::equilibrium::{is_equilibrium_graph, DeviationKind};
use hiernet::graph::{classify, is_critical_edge, is_weakly_connected, DiGraph};
use hiernet::grid::ParamGrid;
use hiernet::payoff::{AgentType, RewardFunction, UtilityParams};
use proptest::prelude::*;

fn steep(n: usize) -> UtilityParams {
    // increments exceed γ + c·n
    UtilityParams::new(
        1.0,
        1.0,
        RewardFunction::linear(0.0, n as f64 + 1.5).unwrap(),
    )
    .unwrap()
}

fn has_critical_edge(g: &DiGraph) -> bool {
    g.edges()
        .filter(|&(i, j)| g.has_edge(j, i))
        .any(|(i, j)| is_critical_edge(i, j, g).unwrap_or(false))
}

fn collapsed(g: &DiGraph) -> BTreeSet<(usize, usize)> {
    g.edges().map(|(i, j)| (i.min(j), i.max(j))).collect()
}

/// Graphs visited by a fully traced run, starting with the initial graph.
fn replay(r: &RunResult) -> Vec<DiGraph> {
    let mut graphs = vec![r.initial_graph.clone()];
    for e in &r.trace {
        let last = graphs.last().unwrap();
        graphs.push(if e.decision.changes_graph() {
            last.toggled(e.pair.0, e.pair.1)
        } else {
            last.clone()
        });
    }
    graphs
}

fn check_decision(e: &TraceEvent, agent_type: AgentType) {
    let weakly_better = e.u_i_after >= e.u_i_before;
    let consent = match (e.u_j_before, e.u_j_after) {
        (Some(b), Some(a)) => Some(a >= b),
        _ => None,
    };
    let expected = if !weakly_better {
        Decision::Kept
    } else if consent == Some(false) {
        Decision::BlockedByConsent
    } else if e.u_i_after == e.u_i_before {
        Decision::SwitchOnIndifference
    } else if e.action == DeviationKind::Add {
        Decision::Added
    } else {
        Decision::Severed
    };
    assert_eq!(e.decision, expected, "{e:?}");
    let consent_evaluated =
        agent_type == AgentType::Consensual && e.action == DeviationKind::Add && weakly_better;
    assert_eq!(consent.is_some(), consent_evaluated, "{e:?}");
}

#[test]
fn fixed_points_are_exactly_equilibria() {
    for point in ParamGrid::default_grid().points {
        for n in [3, 4] {
            for t in AgentType::ALL {
                for mask in 0..1u64 << (n * (n - 1)) {
                    let g = DiGraph::from_pair_mask(n, mask).unwrap();
                    let fixed = DiGraph::ordered_pairs(n).all(|pair| {
                        let mut s = ProcessState::new(g.clone(), 0);
                        step(&mut s, pair, &point.params, t);
                        s.graph == g
                    });
                    assert_eq!(
                        fixed,
                        is_equilibrium_graph(&g, &point.params, t),
                        "{} {t} {g:?}",
                        point.label
                    );
                }
            }
        }
    }
}

#[test]
fn steep_rewards_absorb_from_every_small_graph() {
    for n in [3, 4] {
        let p = steep(n);
        for t in AgentType::ALL {
            for mask in 0..1u64 << (n * (n - 1)) {
                let mut cfg = RunConfig::new(n, p.clone(), t, mask);
                cfg.initial = InitialGraph::Graph {
                    graph: DiGraph::from_pair_mask(n, mask).unwrap(),
                };
                cfg.max_steps = 100_000;
                let r = run(&cfg).unwrap();
                assert!(r.converged, "{t} from {:?}", cfg.initial);
                let g = &r.final_graph;
                assert!(is_weakly_connected(g) && !has_critical_edge(g), "{t} {g:?}");
                assert!(is_equilibrium_graph(g, &p, t));
            }
        }
    }
}

#[test]
fn consensual_runs_from_empty_end_with_single_edges() {
    for n in 3..=6 {
        let cfg = RunConfig::new(n, steep(n), AgentType::Consensual, 0);
        let b = batch(&cfg, 100, &BatchSeeds::Base(40)).unwrap();
        for r in &b.results {
            assert!(r.converged);
            assert!(r
                .final_graph
                .edges()
                .all(|(i, j)| !r.final_graph.has_edge(j, i)));
        }
    }
}

#[test]
fn collapsed_edges_only_grow_once_hierarchy_forms() {
    for n in [4, 5] {
        for t in AgentType::ALL {
            let mut cfg = RunConfig::new(n, steep(n), t, 0);
            cfg.initial = InitialGraph::Random {
                edge_probability: 0.5,
            };
            cfg.trace_limit = usize::MAX;
            let b = batch(&cfg, 100, &BatchSeeds::Base(7)).unwrap();
            for r in &b.results {
                assert!(!r.trace_truncated);
                let graphs = replay(r);
                let Some(start) = graphs
                    .iter()
                    .position(|g| !classify(g).has_directed_cycle && !has_critical_edge(g))
                else {
                    continue;
                };
                for w in graphs[start..].windows(2) {
                    assert!(
                        collapsed(&w[0]).is_subset(&collapsed(&w[1])),
                        "seed {}",
                        r.seed
                    );
                }
            }
        }
    }
}

#[test]
fn traces_replay_to_final_graph_one_edge_at_a_time() {
    for point in ParamGrid::default_grid().points {
        for t in AgentType::ALL {
            let mut cfg = RunConfig::new(4, point.params.clone(), t, 3);
            cfg.initial = InitialGraph::Random {
                edge_probability: 0.4,
            };
            cfg.trace_limit = usize::MAX;
            cfg.max_steps = 20_000;
            let r = run(&cfg).unwrap();
            let graphs = replay(&r);
            assert_eq!(graphs.last().unwrap(), &r.final_graph);
            assert_eq!(r.trace.len() as u64, r.steps);
            for w in graphs.windows(2) {
                let diff = DiGraph::ordered_pairs(4)
                    .filter(|&(i, j)| w[0].has_edge(i, j) != w[1].has_edge(i, j))
                    .count();
                assert!(diff <= 1);
            }
            for (k, e) in r.trace.iter().enumerate() {
                assert_eq!(e.t, k as u64);
                check_decision(e, t);
            }
        }
    }
}

#[test]
fn example_two_scripted_outcomes() {
    let p = UtilityParams::new(
        1.0,
        1.0,
        RewardFunction::table(vec![0.0, 3.0, 6.0]).unwrap(),
    )
    .unwrap();
    let (a, b, c) = (0, 1, 2);
    for (script, expected) in [
        (vec![(a, b), (a, c), (c, b)], vec![(a, b), (a, c), (c, b)]),
        (vec![(a, b), (b, c)], vec![(a, b), (b, c)]),
    ] {
        for seed in 0..20 {
            let mut cfg = RunConfig::new(3, p.clone(), AgentType::Consensual, seed);
            cfg.selector = PairSelector::scripted(script.clone());
            let r = run(&cfg).unwrap();
            assert!(r.converged);
            assert_eq!(r.final_graph.edge_vec(), expected);
        }
    }
}

#[test]
fn nonconsensual_steep_runs_end_in_shortcut_chains() {
    let p = UtilityParams::new(
        1.0,
        1.0,
        RewardFunction::table(vec![0.0, 3.0, 6.0]).unwrap(),
    )
    .unwrap();
    let cfg = RunConfig::new(3, p, AgentType::NonConsensual, 0);
    let b = batch(&cfg, 500, &BatchSeeds::Base(0)).unwrap();
    assert_eq!(b.summary.converged, 500);
    assert_eq!(b.summary.classes.len(), 1);
    let g = b.summary.classes[0].canonical.graph();
    assert_eq!(g.edge_count(), 3);
    assert!(classify(&g).is_sequential_hierarchy);
}

#[test]
fn weighted_selector_runs() {
    let n = 4;
    let weights: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| 1.0 + (i * n + j) as f64).collect())
        .collect();
    let mut cfg = RunConfig::new(n, steep(n), AgentType::Consensual, 9);
    cfg.selector = PairSelector::Weighted { weights };
    let r = run(&cfg).unwrap();
    assert!(r.converged);
    assert_eq!(run(&cfg).unwrap(), r);
}

#[test]
fn single_run_batch_matches_run() {
    let cfg = RunConfig::new(4, steep(4), AgentType::Consensual, 17);
    let b = batch(&cfg, 1, &BatchSeeds::Base(17)).unwrap();
    assert_eq!(b.results[0], run(&cfg).unwrap());
    assert_eq!(b.summary.runs, 1);
}

#[test]
fn run_config_json_round_trip() {
    let mut cfg = RunConfig::new(3, steep(3), AgentType::Consensual, 5);
    cfg.selector = PairSelector::scripted(vec![(0, 1)]);
    cfg.initial = InitialGraph::Graph {
        graph: DiGraph::from_edges(3, [(0, 2)]).unwrap(),
    };
    let s = serde_json::to_string(&cfg).unwrap();
    let back: RunConfig = serde_json::from_str(&s).unwrap();
    assert_eq!(back, cfg);
    let minimal: RunConfig = serde_json::from_str(
        r#"{"n":3,"agent_type":"consensual","seed":1,
            "params":{"gamma":1,"cost":1,"reward":{"type":"linear","h0":0,"slope":2}}}"#,
    )
    .unwrap();
    assert_eq!(minimal.selector, PairSelector::Uniform);
    assert_eq!(minimal.max_steps, 1_000_000);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn same_seed_same_trajectory(seed in any::<u64>(), n in 3usize..6, consensual in any::<bool>(), slope in 0.1f64..8.0) {
        let p = UtilityParams::new(1.0, 1.0, RewardFunction::linear(0.0, slope).unwrap()).unwrap();
        let t = if consensual { AgentType::Consensual } else { AgentType::NonConsensual };
        let mut cfg = RunConfig::new(n, p, t, seed);
        cfg.initial = InitialGraph::Random { edge_probability: 0.3 };
        cfg.trace_limit = 10_000;
        cfg.max_steps = 5_000;
        let a = run(&cfg).unwrap();
        let b = run(&cfg).unwrap();
        prop_assert_eq!(&a, &b);
        if a.converged {
            prop_assert!(is_equilibrium_graph(&a.final_graph, &cfg.params, t));
        }
    }
}
