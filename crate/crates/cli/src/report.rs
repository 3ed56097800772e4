//! Plain-text rendering of reports.

use std::fmt::Write;

use hiernet::equilibrium::{ConditionReport, DeviationReport, Relation};
use hiernet::graph::NodeId;

use crate::experiment::{CheckReport, CrossvalOutput, SimulationSummary};

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn edge_list(edges: &[(NodeId, NodeId)]) -> String {
    let parts: Vec<_> = edges.iter().map(|(i, j)| format!("{i}->{j}")).collect();
    format!("[{}]", parts.join(", "))
}

fn deviation_line(d: &DeviationReport) -> String {
    let (i, j) = d.pair;
    let mut s = format!(
        "{i} {:?}s {i}->{j}: u_{i} {} -> {}",
        d.kind, d.u_i_before, d.u_i_after
    )
    .to_lowercase();
    if let (Some(b), Some(a)) = (d.u_j_before, d.u_j_after) {
        let _ = write!(s, ", u_{j} {b} -> {a}");
    }
    s
}

pub fn conditions(out: &mut String, r: &ConditionReport) {
    let _ = writeln!(
        out,
        "conditions ({}): {}",
        r.agent_type,
        if r.passes { "satisfied" } else { "violated" }
    );
    for c in &r.structural {
        let _ = writeln!(
            out,
            "  {:?}: {}",
            c.condition,
            if c.holds { "holds" } else { "fails" }
        );
    }
    for c in &r.inequalities {
        let rel = match c.relation {
            Relation::Greater => ">",
            Relation::Less => "<",
        };
        let other = c.other.map(|o| format!(", j={o}")).unwrap_or_default();
        let _ = writeln!(
            out,
            "  {:?} [i={}{other}, level {}]: {} {rel} {}  {}",
            c.condition,
            c.agent,
            c.level,
            c.lhs,
            c.rhs,
            if c.holds { "holds" } else { "FAILS" }
        );
    }
    for n in &r.notes {
        let _ = writeln!(out, "  note: {n}");
    }
}

pub fn check(r: &CheckReport) -> String {
    let mut out = String::new();
    let g = &r.graph;
    let _ = writeln!(
        out,
        "graph: n={}, {} edges {}",
        g.n(),
        g.edge_count(),
        edge_list(&g.edge_vec())
    );
    let _ = writeln!(out, "agent type: {}", r.agent_type);
    let cert = &r.certificate;
    let _ = writeln!(out, "equilibrium: {}", yes_no(cert.is_equilibrium));
    if cert.violations.is_empty() {
        let _ = writeln!(out, "violations: none");
    } else {
        let _ = writeln!(out, "violations: {}", cert.violations.len());
        for v in &cert.violations {
            let _ = writeln!(out, "  {}", deviation_line(v));
        }
    }
    if let Some(c) = &cert.characterization {
        conditions(&mut out, c);
    }
    let c = &r.classification;
    let _ = writeln!(out, "classification:");
    let _ = writeln!(out, "  weakly connected: {}", yes_no(c.is_weakly_connected));
    let _ = writeln!(out, "  directed cycle: {}", yes_no(c.has_directed_cycle));
    let _ = writeln!(
        out,
        "  hierarchical structure: {}",
        yes_no(c.is_hierarchical_structure)
    );
    let _ = writeln!(
        out,
        "  sequential hierarchy: {}",
        yes_no(c.is_sequential_hierarchy)
    );
    let _ = writeln!(
        out,
        "  complete teams: {}",
        yes_no(c.all_components_complete)
    );
    let _ = writeln!(out, "  levels: {} {:?}", c.level_span, c.levels);
    let per_level: Vec<_> = c
        .components_per_level
        .iter()
        .map(|(l, k)| format!("{l}:{k}"))
        .collect();
    let _ = writeln!(out, "  components per level: {}", per_level.join(" "));
    let _ = writeln!(out, "  teams: {:?}", c.teams);
    out
}

pub fn simulation(s: &SimulationSummary) -> String {
    let mut out = String::new();
    let b = &s.summary;
    let _ = writeln!(
        out,
        "{} run(s), n={}, {}, seed {} ({})",
        b.runs, s.n, s.agent_type, s.seed, s.rng
    );
    let _ = writeln!(
        out,
        "converged: {}/{} ({:.2}%)",
        b.converged,
        b.runs,
        100.0 * b.convergence_rate
    );
    if let Some(t) = &b.absorption_time {
        let _ = writeln!(
            out,
            "absorption time: min {}, median {}, mean {:.2}, max {}",
            t.min, t.median, t.mean, t.max
        );
    }
    if let [r] = s.runs.as_slice() {
        let _ = writeln!(out, "final graph: {}", edge_list(&r.final_edges));
    }
    if !b.classes.is_empty() {
        let _ = writeln!(out, "final graphs up to isomorphism:");
        let _ = writeln!(out, "  {:>8}  {:>8}  edges", "count", "share");
        for c in &b.classes {
            let _ = writeln!(
                out,
                "  {:>8}  {:>7.2}%  {}",
                c.count,
                100.0 * c.frequency,
                edge_list(&c.edges)
            );
        }
    }
    out
}

pub fn crossval(c: &CrossvalOutput) -> String {
    let mut out = String::new();
    let r = &c.report;
    let _ = writeln!(out, "crossval n={} grid {}", r.n, r.grid);
    let _ = writeln!(
        out,
        "  {:<20} {:<15} {:>8} {:>12} {:>12} {:>10}",
        "point", "agent type", "graphs", "brute force", "conditions", "mismatches"
    );
    for p in &r.points {
        let _ = writeln!(
            out,
            "  {:<20} {:<15} {:>8} {:>12} {:>12} {:>10}",
            p.label,
            p.agent_type.as_str(),
            p.graphs,
            p.brute_force,
            p.characterized,
            p.mismatches
        );
        for m in &p.mismatch_sample {
            let _ = writeln!(
                out,
                "    mismatch {}: brute force {}, conditions {}",
                edge_list(&m.edges),
                m.brute_force,
                m.characterized
            );
        }
    }
    for s in &r.nesting {
        let _ = writeln!(
            out,
            "  nesting {:<20} non-consensual {} consensual {} subset {} strict {}",
            s.label,
            s.nonconsensual,
            s.consensual,
            yes_no(s.subset),
            yes_no(s.strict)
        );
    }
    let _ = writeln!(out, "total mismatches: {}", r.total_mismatches);
    out
}
