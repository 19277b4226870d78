//! Graphviz DOT export.

use std::fmt::Write;

use crate::dag::Dag;
use crate::flow::Flow;
use crate::product::{Hypercube, ProductDigraph};
use crate::rational::format_q;
use crate::reduction::ReachableSystem;
use crate::set_system::CoveringDigraph;
use crate::Coalition;

/// Nodes in index order, edges in edge-id order.
pub fn export_dot(
    name: &str,
    labels: &[String],
    arcs: &[(usize, usize)],
    flow: Option<&Flow>,
) -> String {
    let mut out = String::new();
    writeln!(out, "digraph {name} {{").unwrap();
    writeln!(out, "  rankdir=BT;").unwrap();
    for (v, l) in labels.iter().enumerate() {
        writeln!(out, "  n{v} [label=\"{}\"];", l.replace('"', "\\\"")).unwrap();
    }
    for (e, &(a, b)) in arcs.iter().enumerate() {
        match flow {
            Some(f) => writeln!(
                out,
                "  n{a} -> n{b} [label=\"{}\"];",
                format_q(&f.weights[e])
            )
            .unwrap(),
            None => writeln!(out, "  n{a} -> n{b};").unwrap(),
        }
    }
    out.push_str("}\n");
    out
}

pub fn covering_dot(d: &CoveringDigraph, flow: Option<&Flow>) -> String {
    let labels: Vec<String> = d.vertices().iter().map(|c| c.to_string()).collect();
    export_dot("factor", &labels, d.arcs(), flow)
}

pub fn product_dot(pd: &ProductDigraph, flow: Option<&Flow>) -> String {
    let labels: Vec<String> = (0..pd.vertex_count())
        .map(|v| pd.profile(v).to_string())
        .collect();
    export_dot("product", &labels, pd.arcs(), flow)
}

/// Vertices labeled by the set `S` of blocks.
pub fn hypercube_dot(h: &Hypercube, flow: Option<&Flow>) -> String {
    let d = h.digraph();
    let labels: Vec<String> = (0..d.vertex_count())
        .map(|v| format!("R{}", Coalition(h.mask(v))))
        .collect();
    export_dot("hypercube", &labels, d.arcs(), flow)
}

pub fn star_dot(rs: &ReachableSystem, flow: Option<&Flow>) -> String {
    let labels: Vec<String> = rs.coalitions.iter().map(|c| c.to_string()).collect();
    export_dot("reachable", &labels, rs.arcs(), flow)
}
