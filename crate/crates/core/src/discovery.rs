//! Directly-follows model discovery with rate-based filtering.
//!
//! An activity is kept when its case frequency is at least
//! `(100 - activity_rate) / 100`; a transition, including the edges leaving
//! `start` and entering `end`, when its case frequency is at least
//! `(100 - transition_rate) / 100`. Filtering can leave nodes that are not on
//! any start-to-end path, so the filtered graph is repaired by greedily
//! re-inserting the most significant log transitions until every node is
//! reachable from `start` and reaches `end`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eventlog::EventLog;
use crate::stats::{compute_significance, Frequency, SignificanceTable, TableBuilder};

/// A node of a process model: the two sentinels or a labelled node.
///
/// Ordering puts `Start` first and `End` last, so edge sets sort the way
/// they are rendered.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Node {
    Start,
    Activity(String),
    End,
}

impl Node {
    pub fn activity(label: impl Into<String>) -> Self {
        Node::Activity(label.into())
    }

    pub fn label(&self) -> Option<&str> {
        match self {
            Node::Activity(a) => Some(a),
            _ => None,
        }
    }

    pub fn is_sentinel(&self) -> bool {
        !matches!(self, Node::Activity(_))
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Start => f.write_str("start"),
            Node::End => f.write_str("end"),
            Node::Activity(a) => f.write_str(a),
        }
    }
}

pub type Edge = (Node, Node);

/// Activity and transition rates, both percentages in `[0, 100]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateParams {
    pub activity_rate: f64,
    pub transition_rate: f64,
}

impl RateParams {
    pub fn new(activity_rate: f64, transition_rate: f64) -> Result<Self> {
        for rate in [activity_rate, transition_rate] {
            if !(0.0..=100.0).contains(&rate) {
                return Err(Error::InvalidRate(rate));
            }
        }
        Ok(RateParams {
            activity_rate,
            transition_rate,
        })
    }

    /// The unfiltered setting `(100, 100)`.
    pub fn full() -> Self {
        RateParams {
            activity_rate: 100.0,
            transition_rate: 100.0,
        }
    }

    pub fn activity_threshold(&self) -> f64 {
        (100.0 - self.activity_rate) / 100.0
    }

    pub fn transition_threshold(&self) -> f64 {
        (100.0 - self.transition_rate) / 100.0
    }
}

impl fmt::Display for RateParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.activity_rate, self.transition_rate)
    }
}

// cases/num_traces >= (100 - rate)/100, compared without dividing so that
// integer rates hit the boundary exactly.
fn passes(freq: &Frequency, num_traces: usize, rate: f64) -> bool {
    100.0 * freq.cases as f64 >= (100.0 - rate) * num_traces as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Activity,
    MetaState,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeInfo {
    pub kind: NodeKind,
    /// Case frequency.
    pub significance: f64,
    /// Absolute frequency.
    pub frequency: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeInfo {
    pub significance: f64,
    pub frequency: usize,
    /// Added by reachability repair rather than by filtering.
    pub repair: bool,
}

/// A directly-follows process model with `start`/`end` sentinels.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessModel {
    nodes: BTreeMap<String, NodeInfo>,
    edges: BTreeMap<Edge, EdgeInfo>,
    params: RateParams,
    num_traces: usize,
}

impl ProcessModel {
    /// Assembles a model from its parts without checking reachability.
    pub fn from_parts(
        nodes: BTreeMap<String, NodeInfo>,
        edges: BTreeMap<Edge, EdgeInfo>,
        params: RateParams,
        num_traces: usize,
    ) -> Self {
        ProcessModel {
            nodes,
            edges,
            params,
            num_traces,
        }
    }

    pub fn nodes(&self) -> &BTreeMap<String, NodeInfo> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeMap<Edge, EdgeInfo> {
        &self.edges
    }

    pub fn params(&self) -> RateParams {
        self.params
    }

    /// Number of cases of the log the model was mined from.
    pub fn num_traces(&self) -> usize {
        self.num_traces
    }

    pub fn contains(&self, label: &str) -> bool {
        self.nodes.contains_key(label)
    }

    pub fn has_edge(&self, from: &Node, to: &Node) -> bool {
        self.edges.contains_key(&(from.clone(), to.clone()))
    }

    /// Number of labelled nodes, sentinels excluded.
    pub fn num_activity_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Inserts or replaces an edge. Endpoints must be nodes of the model.
    pub fn insert_edge(&mut self, from: Node, to: Node, info: EdgeInfo) {
        self.edges.insert((from, to), info);
    }

    pub fn meta_state_nodes(&self) -> impl Iterator<Item = &str> {
        self.nodes
            .iter()
            .filter(|(_, info)| info.kind == NodeKind::MetaState)
            .map(|(label, _)| label.as_str())
    }

    /// Nodes that are not reachable from `start` or cannot reach `end`.
    pub fn unreachable_nodes(&self) -> Vec<String> {
        let edges: BTreeSet<Edge> = self.edges.keys().cloned().collect();
        let forward = reach(&edges, Node::Start, false);
        let backward = reach(&edges, Node::End, true);
        self.nodes
            .keys()
            .filter(|label| {
                let node = Node::Activity((*label).clone());
                !forward.contains(&node) || !backward.contains(&node)
            })
            .cloned()
            .collect()
    }
}

/// Nodes and candidate edges that pass the rate thresholds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilteredElements {
    pub nodes: BTreeSet<String>,
    pub edges: BTreeSet<Edge>,
}

/// Applies both thresholds to the significance table.
pub fn filter_elements(table: &SignificanceTable, params: RateParams) -> FilteredElements {
    let nodes: BTreeSet<String> = table
        .activities()
        .iter()
        .filter(|(_, f)| passes(f, table.num_traces(), params.activity_rate))
        .map(|(a, _)| a.clone())
        .collect();
    let edges = select_edges(table, &nodes, params.transition_rate);
    FilteredElements { nodes, edges }
}

fn select_edges(table: &SignificanceTable, nodes: &BTreeSet<String>, rate: f64) -> BTreeSet<Edge> {
    let k = table.num_traces();
    let mut edges = BTreeSet::new();
    for (a, f) in table.starts() {
        if nodes.contains(a) && passes(f, k, rate) {
            edges.insert((Node::Start, Node::Activity(a.clone())));
        }
    }
    for ((a, b), f) in table.transitions() {
        if nodes.contains(a) && nodes.contains(b) && passes(f, k, rate) {
            edges.insert((Node::Activity(a.clone()), Node::Activity(b.clone())));
        }
    }
    for (a, f) in table.ends() {
        if nodes.contains(a) && passes(f, k, rate) {
            edges.insert((Node::Activity(a.clone()), Node::End));
        }
    }
    edges
}

/// Log transitions between the given nodes (start/end positions included),
/// with their case counts.
fn direct_transitions(table: &SignificanceTable, nodes: &BTreeSet<String>) -> Vec<(Edge, usize)> {
    select_edges(table, nodes, 100.0)
        .into_iter()
        .map(|edge| {
            let cases = match &edge {
                (Node::Start, Node::Activity(a)) => table.starts()[a].cases,
                (Node::Activity(a), Node::End) => table.ends()[a].cases,
                (Node::Activity(a), Node::Activity(b)) => {
                    table.transitions()[&(a.clone(), b.clone())].cases
                }
                _ => unreachable!("sentinel-only edge"),
            };
            (edge, cases)
        })
        .collect()
}

fn reach(edges: &BTreeSet<Edge>, from: Node, reverse: bool) -> BTreeSet<Node> {
    let mut adjacency: BTreeMap<&Node, Vec<&Node>> = BTreeMap::new();
    for (u, v) in edges {
        if reverse {
            adjacency.entry(v).or_default().push(u);
        } else {
            adjacency.entry(u).or_default().push(v);
        }
    }
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([from.clone()]);
    seen.insert(from);
    while let Some(node) = queue.pop_front() {
        if let Some(next) = adjacency.get(&node) {
            for n in next {
                if seen.insert((*n).clone()) {
                    queue.push_back((*n).clone());
                }
            }
        }
    }
    seen
}

/// Edge set after repair; `true` marks edges added by the repair.
pub type RepairedEdges = BTreeMap<Edge, bool>;

/// Adds log transitions until every node lies on a start-to-end path.
///
/// Forward pass: while some node is unreachable from `start`, add the most
/// significant log transition (start positions included) from a reachable
/// node to an unreachable one; ties go to the smaller `(from, to)`. The
/// backward pass does the same for reaching `end`.
pub fn repair_reachability(
    nodes: &BTreeSet<String>,
    edges: &BTreeSet<Edge>,
    table: &SignificanceTable,
) -> Result<RepairedEdges> {
    repair(nodes, edges, table, None).map(|(edges, _)| edges)
}

/// Where repair looks when no direct log transition can connect a node.
struct Fallback<'a> {
    source: &'a TraceSource<'a>,
}

type ProjectedCounts = BTreeMap<Edge, Frequency>;

fn repair(
    nodes: &BTreeSet<String>,
    edges: &BTreeSet<Edge>,
    table: &SignificanceTable,
    fallback: Option<Fallback<'_>>,
) -> Result<(RepairedEdges, ProjectedCounts)> {
    let mut current = edges.clone();
    let mut added = BTreeSet::new();

    let mut direct = direct_transitions(table, nodes);
    sort_candidates(&mut direct);
    let mut projected: Option<Vec<(Edge, usize)>> = None;
    let mut projected_counts = ProjectedCounts::new();

    for backward in [false, true] {
        loop {
            let anchor = if backward { Node::End } else { Node::Start };
            let connected = reach(&current, anchor, backward);
            let missing = nodes
                .iter()
                .find(|a| !connected.contains(&Node::Activity((*a).clone())));
            let Some(missing) = missing else { break };

            // (u, v): forward needs u connected and v not; backward the reverse
            let usable = |(u, v): &Edge| {
                if backward {
                    connected.contains(v) && !u.is_sentinel() && !connected.contains(u)
                } else {
                    connected.contains(u) && !v.is_sentinel() && !connected.contains(v)
                }
            };
            let mut pick = direct
                .iter()
                .find(|(e, _)| usable(e))
                .map(|(e, _)| e.clone());
            if pick.is_none() {
                if let Some(fallback) = &fallback {
                    let candidates = projected.get_or_insert_with(|| {
                        projected_counts = fallback.source.projected_transitions(nodes);
                        let mut list: Vec<(Edge, usize)> = projected_counts
                            .iter()
                            .map(|(e, f)| (e.clone(), f.cases))
                            .collect();
                        sort_candidates(&mut list);
                        list
                    });
                    pick = candidates
                        .iter()
                        .find(|(e, _)| usable(e))
                        .map(|(e, _)| e.clone());
                }
            }
            let Some(edge) = pick else {
                return Err(Error::RepairImpossible(missing.clone()));
            };
            current.insert(edge.clone());
            added.insert(edge);
        }
    }

    let repaired = current
        .into_iter()
        .map(|e| {
            let repair = added.contains(&e);
            (e, repair)
        })
        .collect();
    Ok((repaired, projected_counts))
}

fn sort_candidates(list: &mut [(Edge, usize)]) {
    list.sort_by(|(ea, ca), (eb, cb)| cb.cmp(ca).then_with(|| ea.cmp(eb)));
}

/// The behaviour a model is mined from: plain traces, or traces of label
/// sets produced by inner aggregation.
pub(crate) enum TraceSource<'a> {
    Log(&'a EventLog),
    Slots(Vec<Vec<Vec<String>>>),
}

impl TraceSource<'_> {
    /// Directly-follows counts of the traces projected onto `nodes`.
    fn projected_transitions(&self, nodes: &BTreeSet<String>) -> ProjectedCounts {
        let mut builder = TableBuilder::new();
        let keep = |label: &String| nodes.contains(label);
        match self {
            TraceSource::Log(log) => {
                for trace in log.traces() {
                    let events: Vec<&String> = trace.events.iter().filter(|e| keep(e)).collect();
                    builder.add_trace(&events);
                }
            }
            TraceSource::Slots(traces) => {
                for slots in traces {
                    let slots: Vec<Vec<&String>> = slots
                        .iter()
                        .map(|s| s.iter().filter(|e| keep(e)).collect())
                        .collect();
                    builder.add_slots(&slots, |l| nodes.contains(l));
                }
            }
        }
        let mut counts = ProjectedCounts::new();
        let Ok(table) = builder.finish() else {
            return counts;
        };
        for (a, f) in table.starts() {
            counts.insert((Node::Start, Node::Activity(a.clone())), *f);
        }
        for ((a, b), f) in table.transitions() {
            counts.insert((Node::Activity(a.clone()), Node::Activity(b.clone())), *f);
        }
        for (a, f) in table.ends() {
            counts.insert((Node::Activity(a.clone()), Node::End), *f);
        }
        counts
    }
}

/// Discovers models from one log at any number of rate settings, computing
/// the significance table only once.
pub struct Miner<'a> {
    source: TraceSource<'a>,
    table: SignificanceTable,
    /// Meta-state tokens: exempt from activity filtering.
    tokens: BTreeSet<String>,
}

impl<'a> Miner<'a> {
    pub fn new(log: &'a EventLog) -> Result<Self> {
        Ok(Miner {
            table: compute_significance(log)?,
            source: TraceSource::Log(log),
            tokens: BTreeSet::new(),
        })
    }

    pub(crate) fn with_tokens(log: &'a EventLog, tokens: BTreeSet<String>) -> Result<Self> {
        let mut miner = Self::new(log)?;
        miner.tokens = tokens;
        Ok(miner)
    }

    pub(crate) fn from_slots(
        slots: Vec<Vec<Vec<String>>>,
        tokens: BTreeSet<String>,
    ) -> Result<Miner<'static>> {
        let mut builder = TableBuilder::new();
        for trace in &slots {
            builder.add_slots(trace, |l| tokens.contains(l));
        }
        Ok(Miner {
            table: builder.finish()?,
            source: TraceSource::Slots(slots),
            tokens,
        })
    }

    pub fn table(&self) -> &SignificanceTable {
        &self.table
    }

    pub fn discover(&self, params: RateParams) -> Result<ProcessModel> {
        let table = &self.table;
        let mut nodes = filter_elements(table, params).nodes;
        nodes.extend(
            self.tokens
                .iter()
                .filter(|t| table.activities().contains_key(*t))
                .cloned(),
        );
        if nodes.is_empty() {
            // nothing reaches the threshold: keep the most frequent activities
            let best = table
                .activities()
                .values()
                .map(|f| f.cases)
                .max()
                .unwrap_or(0);
            nodes.extend(
                table
                    .activities()
                    .iter()
                    .filter(|(_, f)| f.cases == best)
                    .map(|(a, _)| a.clone()),
            );
        }
        let edges = select_edges(table, &nodes, params.transition_rate);
        // Two-way pairs (see `stats::conflict_pairs`) are kept as they are:
        // cycles are what meta-states are made of.
        let fallback = Fallback {
            source: &self.source,
        };
        let (repaired, projected) = repair(&nodes, &edges, table, Some(fallback))?;

        let k = table.num_traces();
        let node_info = nodes
            .into_iter()
            .map(|label| {
                let f = table.activities()[&label];
                let kind = if self.tokens.contains(&label) {
                    NodeKind::MetaState
                } else {
                    NodeKind::Activity
                };
                let info = NodeInfo {
                    kind,
                    significance: f.case_frequency(k),
                    frequency: f.total,
                };
                (label, info)
            })
            .collect();
        let edge_info = repaired
            .into_iter()
            .map(|(edge, repair)| {
                let f = edge_frequency(table, &edge)
                    .or_else(|| projected.get(&edge).copied())
                    .unwrap_or_default();
                let info = EdgeInfo {
                    significance: f.case_frequency(k),
                    frequency: f.total,
                    repair,
                };
                (edge, info)
            })
            .collect();
        Ok(ProcessModel {
            nodes: node_info,
            edges: edge_info,
            params,
            num_traces: k,
        })
    }
}

fn edge_frequency(table: &SignificanceTable, edge: &Edge) -> Option<Frequency> {
    match edge {
        (Node::Start, Node::Activity(a)) => table.starts().get(a).copied(),
        (Node::Activity(a), Node::End) => table.ends().get(a).copied(),
        (Node::Activity(a), Node::Activity(b)) => {
            table.transitions().get(&(a.clone(), b.clone())).copied()
        }
        _ => None,
    }
}

/// Discovers the filtered and repaired model of `log` at `params`.
pub fn discover(log: &EventLog, params: RateParams) -> Result<ProcessModel> {
    Miner::new(log)?.discover(params)
}
