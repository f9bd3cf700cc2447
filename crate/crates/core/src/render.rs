//! Graphviz DOT output for process maps and combination graphs.
//!
//! Nodes and edges are written in sorted order so that equal models give
//! byte-identical files.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::discovery::{Node, NodeKind};
use crate::export::fmt_number;
use crate::metastates::{AggregatedModel, CombinationGraph};

const START_FILL: &str = "#3cb371";
const END_FILL: &str = "#e0413a";
const NODE_FILLS: [&str; 5] = ["#eff3ff", "#bdd7e7", "#6baed6", "#3182bd", "#08519c"];
const PEN_WIDTHS: [f64; 5] = [1.0, 1.75, 2.5, 3.25, 4.0];

/// Quoted DOT string.
pub fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => {}
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// One of five levels, 0 for the smallest values.
fn bucket(value: usize, max: usize) -> usize {
    if max == 0 || value == 0 {
        return 0;
    }
    ((5 * value).div_ceil(max)).clamp(1, 5) - 1
}

/// Renders a (possibly aggregated) model.
///
/// `start` is filled green and labelled with the number of cases, `end` is
/// filled red. Node and edge labels carry absolute frequencies; darker fills
/// and thicker pens mean higher frequencies. Repair edges are dashed and
/// meta-state nodes drawn as double-bordered boxes.
pub fn render_model(aggregated: &AggregatedModel) -> String {
    let model = &aggregated.model;
    let ids: BTreeMap<&str, String> = model
        .nodes()
        .keys()
        .enumerate()
        .map(|(i, label)| (label.as_str(), format!("n{i}")))
        .collect();
    let id_of = |node: &Node| match node {
        Node::Start => "start".to_string(),
        Node::End => "end".to_string(),
        Node::Activity(a) => ids[a.as_str()].clone(),
    };

    let mut out = String::new();
    out.push_str("digraph process_map {\n");
    out.push_str("  rankdir=TB;\n");
    out.push_str("  node [fontname=\"Helvetica\", shape=box, style=\"rounded,filled\"];\n");
    out.push_str("  edge [fontname=\"Helvetica\"];\n");
    let _ = writeln!(
        out,
        "  start [label={}, shape=circle, fillcolor=\"{START_FILL}\", fontcolor=white];",
        quote(&format!("start\n{}", model.num_traces()))
    );
    let _ = writeln!(
        out,
        "  end [label=\"end\", shape=doublecircle, fillcolor=\"{END_FILL}\", fontcolor=white];"
    );

    let max_node = model
        .nodes()
        .values()
        .map(|n| n.frequency)
        .max()
        .unwrap_or(0);
    for (label, info) in model.nodes() {
        let level = bucket(info.frequency, max_node);
        let font = if level >= 3 { "white" } else { "black" };
        let text = format!("{label}\n{}", info.frequency);
        let shape = match info.kind {
            NodeKind::MetaState => ", shape=box, peripheries=2, style=\"filled,bold\"",
            NodeKind::Activity => "",
        };
        let _ = writeln!(
            out,
            "  {} [label={}, fillcolor=\"{}\", fontcolor={font}{shape}];",
            ids[label.as_str()],
            quote(&text),
            NODE_FILLS[level]
        );
    }

    let max_edge = model
        .edges()
        .values()
        .map(|e| e.frequency)
        .max()
        .unwrap_or(0);
    for ((u, v), info) in model.edges() {
        let level = bucket(info.frequency, max_edge);
        let style = if info.repair { ", style=dashed" } else { "" };
        let _ = writeln!(
            out,
            "  {} -> {} [label=\"{}\", penwidth={}{style}];",
            id_of(u),
            id_of(v),
            info.frequency,
            fmt_number(PEN_WIDTHS[level])
        );
    }
    out.push_str("}\n");
    out
}

/// Renders combinations as nodes with their member meta-states and
/// coverage; edges are labelled with the meta-states gained.
pub fn render_combinations(graph: &CombinationGraph) -> String {
    let mut out = String::new();
    out.push_str("digraph combinations {\n");
    out.push_str("  node [fontname=\"Helvetica\", shape=ellipse];\n");
    out.push_str("  edge [fontname=\"Helvetica\"];\n");
    for (combo, centrality) in graph.combinations.iter().zip(&graph.centrality) {
        let text = format!(
            "{}\n{}\ncoverage {}",
            combo.id,
            combo.label(),
            fmt_number(combo.coverage)
        );
        let _ = writeln!(
            out,
            "  {} [label={}, centrality=\"{}\"];",
            quote(&combo.id),
            quote(&text),
            fmt_number(*centrality)
        );
    }
    for edge in &graph.edges {
        let _ = writeln!(
            out,
            "  {} -> {} [label={}];",
            quote(&graph.combinations[edge.from].id),
            quote(&graph.combinations[edge.to].id),
            quote(&edge.label())
        );
    }
    out.push_str("}\n");
    out
}
