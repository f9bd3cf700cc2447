//! Cycles, meta-states and model aggregation.
//!
//! A cycle is a stretch of a trace that starts at an activity and runs up to
//! (not including) the next occurrence of that same activity, with no
//! activity repeated inside. Cycles that also exist in a discovered model,
//! have at least two activities, and occur in a large enough share of cases
//! are meta-states. Meta-states can be folded into single nodes:
//!
//! * outer aggregation keeps their member activities as ordinary nodes next
//!   to the meta-state nodes;
//! * inner aggregation hides the member activities and redirects their
//!   transitions to every meta-state containing them, or only to the most
//!   significant one.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discovery::{Edge, Miner, Node, ProcessModel, RateParams};
use crate::error::{Error, Result};
use crate::eventlog::{EventLog, Trace};
use crate::quality::Replayer;
use crate::stats::Frequency;

/// A simple cycle and how often it occurs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cycle {
    pub body: Vec<String>,
    pub abs_freq: usize,
    pub case_count: usize,
    pub significance: f64,
}

impl Cycle {
    /// `[A·B·C]`
    pub fn token(&self) -> String {
        token_label(&self.body)
    }
}

pub fn token_label<S: AsRef<str>>(body: &[S]) -> String {
    let parts: Vec<&str> = body.iter().map(|s| s.as_ref()).collect();
    format!("[{}]", parts.join("·"))
}

/// Short rendering used in combination labels: `BC` when every activity is a
/// single character, `Bx·Cy` otherwise.
pub fn compact_label<S: AsRef<str>>(body: &[S]) -> String {
    let parts: Vec<&str> = body.iter().map(|s| s.as_ref()).collect();
    if parts.iter().all(|p| p.chars().count() == 1) {
        parts.concat()
    } else {
        parts.join("·")
    }
}

/// Cycles of a log keyed by body, with absolute and case counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleTable {
    counts: BTreeMap<Vec<String>, Frequency>,
    num_traces: usize,
}

impl CycleTable {
    pub fn num_traces(&self) -> usize {
        self.num_traces
    }

    pub fn counts(&self) -> &BTreeMap<Vec<String>, Frequency> {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// All cycles in body order.
    pub fn cycles(&self) -> Vec<Cycle> {
        self.counts
            .iter()
            .map(|(body, f)| Cycle {
                body: body.clone(),
                abs_freq: f.total,
                case_count: f.cases,
                significance: f.case_frequency(self.num_traces),
            })
            .collect()
    }

    /// Cycles whose activities are model nodes and whose consecutive pairs,
    /// including the closing one, are model edges.
    pub fn in_model(&self, model: &ProcessModel) -> Vec<Cycle> {
        self.cycles()
            .into_iter()
            .filter(|c| cycle_in_model(&c.body, model))
            .collect()
    }
}

fn cycle_in_model(body: &[String], model: &ProcessModel) -> bool {
    if !body.iter().all(|a| model.contains(a)) {
        return false;
    }
    let k = body.len();
    (0..k).all(|i| {
        model.has_edge(
            &Node::Activity(body[i].clone()),
            &Node::Activity(body[(i + 1) % k].clone()),
        )
    })
}

fn trace_cycles(events: &[String]) -> Vec<&[String]> {
    let mut positions: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, e) in events.iter().enumerate() {
        positions.entry(e).or_default().push(i);
    }
    let mut found = Vec::new();
    for occurrences in positions.values() {
        for pair in occurrences.windows(2) {
            let segment = &events[pair[0]..pair[1]];
            let distinct: BTreeSet<&String> = segment.iter().collect();
            if distinct.len() == segment.len() {
                found.push(segment);
            }
        }
    }
    found
}

/// Mines every simple cycle of every trace.
///
/// For each activity of a trace, each pair of its consecutive occurrences
/// delimits a candidate; it is a cycle when no activity repeats inside it.
/// `abs_freq` counts occurrences, `case_count` counts traces.
pub fn cycles_search(log: &EventLog) -> CycleTable {
    let per_trace: Vec<Vec<&[String]>> = log
        .traces()
        .par_iter()
        .map(|t| trace_cycles(&t.events))
        .collect();
    let mut counts: BTreeMap<Vec<String>, Frequency> = BTreeMap::new();
    for found in per_trace {
        let mut seen = BTreeSet::new();
        for segment in found {
            let freq = counts.entry(segment.to_vec()).or_default();
            freq.total += 1;
            if seen.insert(segment) {
                freq.cases += 1;
            }
        }
    }
    CycleTable {
        counts,
        num_traces: log.num_traces(),
    }
}

/// A significant cycle of length two or more.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaState {
    pub cycle: Cycle,
}

impl MetaState {
    pub fn body(&self) -> &[String] {
        &self.cycle.body
    }

    pub fn token(&self) -> String {
        self.cycle.token()
    }

    pub fn significance(&self) -> f64 {
        self.cycle.significance
    }

    pub fn contains(&self, activity: &str) -> bool {
        self.cycle.body.iter().any(|a| a == activity)
    }
}

/// Cycles with at least two activities whose case share reaches `threshold`.
pub fn find_states(cycles: &[Cycle], num_traces: usize, threshold: f64) -> Vec<MetaState> {
    cycles
        .iter()
        .filter(|c| c.body.len() > 1)
        .filter(|c| c.case_count as f64 >= threshold * num_traces as f64)
        .map(|c| MetaState { cycle: c.clone() })
        .collect()
}

/// Meta-states among the cycles present in `model`.
pub fn states_in_model(
    cycles: &CycleTable,
    model: &ProcessModel,
    threshold: f64,
) -> Vec<MetaState> {
    find_states(&cycles.in_model(model), cycles.num_traces(), threshold)
}

/// A piece of a trace after cycle collapsing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Segment<'a> {
    Event(&'a str),
    /// The state's body repeated `repetitions` times, followed by its first
    /// activity.
    Collapsed {
        state: usize,
        repetitions: usize,
    },
}

/// State indices in matching priority: longer body, then higher
/// significance, then smaller body.
fn priority(states: &[MetaState]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..states.len()).collect();
    order.sort_by(|&a, &b| {
        let (sa, sb) = (&states[a], &states[b]);
        sb.body()
            .len()
            .cmp(&sa.body().len())
            .then(sb.significance().total_cmp(&sa.significance()))
            .then_with(|| sa.body().cmp(sb.body()))
    });
    order
}

/// Largest `j >= 1` with `events[at..]` starting with `body` repeated `j`
/// times followed by `body[0]`.
fn occurrence(events: &[String], at: usize, body: &[String]) -> Option<usize> {
    let k = body.len();
    let run = events[at..]
        .iter()
        .enumerate()
        .take_while(|(t, e)| **e == body[t % k])
        .count();
    if run == 0 {
        return None;
    }
    let repetitions = (run - 1) / k;
    (repetitions >= 1).then_some(repetitions)
}

fn collapse_with<'a>(
    events: &'a [String],
    states: &[MetaState],
    order: &[usize],
) -> Vec<Segment<'a>> {
    let mut out = Vec::with_capacity(events.len());
    let mut i = 0;
    while i < events.len() {
        let hit = order.iter().find_map(|&s| {
            occurrence(events, i, states[s].body()).map(|repetitions| (s, repetitions))
        });
        match hit {
            Some((state, repetitions)) => {
                out.push(Segment::Collapsed { state, repetitions });
                i += repetitions * states[state].body().len() + 1;
            }
            None => {
                out.push(Segment::Event(&events[i]));
                i += 1;
            }
        }
    }
    out
}

/// Collapses meta-state occurrences in one trace, scanning left to right.
pub fn collapse_trace<'a>(events: &'a [String], states: &[MetaState]) -> Vec<Segment<'a>> {
    collapse_with(events, states, &priority(states))
}

/// Rewrites every trace with meta-state occurrences replaced by their tokens.
pub fn rebuild_log(log: &EventLog, states: &[MetaState]) -> Result<EventLog> {
    if states.is_empty() {
        return Ok(log.clone());
    }
    let order = priority(states);
    let tokens: Vec<String> = states.iter().map(MetaState::token).collect();
    let traces = log
        .traces()
        .iter()
        .map(|t| {
            let events = collapse_with(&t.events, states, &order)
                .into_iter()
                .map(|seg| match seg {
                    Segment::Event(e) => e.to_string(),
                    Segment::Collapsed { state, .. } => tokens[state].clone(),
                })
                .collect();
            Trace::new(t.case_id.clone(), events)
        })
        .collect();
    EventLog::from_traces(traces)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AggregationMode {
    #[default]
    None,
    Outer,
    /// Inner aggregation redirecting to every containing meta-state.
    InnerAll,
    /// Inner aggregation redirecting to the most significant containing
    /// meta-state.
    InnerFreq,
}

impl AggregationMode {
    pub const ALL: [AggregationMode; 4] = [
        AggregationMode::None,
        AggregationMode::Outer,
        AggregationMode::InnerAll,
        AggregationMode::InnerFreq,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            AggregationMode::None => "none",
            AggregationMode::Outer => "outer",
            AggregationMode::InnerAll => "inner_all",
            AggregationMode::InnerFreq => "inner_freq",
        }
    }
}

impl fmt::Display for AggregationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AggregationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AggregationMode::ALL
            .into_iter()
            .find(|m| m.name() == s.replace('-', "_"))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown aggregation mode `{s}`")))
    }
}

/// A model that may contain meta-state nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregatedModel {
    pub model: ProcessModel,
    pub mode: AggregationMode,
    /// Meta-states folded into the model, in body order.
    pub states: Vec<MetaState>,
}

impl AggregatedModel {
    pub fn plain(model: ProcessModel) -> Self {
        AggregatedModel {
            model,
            mode: AggregationMode::None,
            states: Vec::new(),
        }
    }

    /// Activities belonging to some meta-state.
    pub fn member_activities(&self) -> BTreeSet<&str> {
        self.states
            .iter()
            .flat_map(|s| s.body().iter().map(String::as_str))
            .collect()
    }

    /// Activity nodes that belong to no meta-state.
    pub fn free_activities(&self) -> BTreeSet<&str> {
        let members = self.member_activities();
        self.model
            .nodes()
            .keys()
            .map(String::as_str)
            .filter(|a| !members.contains(a) && self.state_of_token(a).is_none())
            .collect()
    }

    pub fn state_of_token(&self, label: &str) -> Option<&MetaState> {
        self.states.iter().find(|s| s.token() == label)
    }

    /// Activities a replay counts as covered: plain nodes plus the members of
    /// meta-state nodes.
    pub fn represented_activities(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        for label in self.model.nodes().keys() {
            match self.state_of_token(label) {
                Some(state) => out.extend(state.body().iter().map(String::as_str)),
                None => {
                    out.insert(label.as_str());
                }
            }
        }
        out
    }

    pub fn replayer(&self, num_unique_activities: usize) -> Result<Replayer> {
        let edges = expanded_edges(self);
        let represented = self.represented_activities();
        Replayer::new(
            represented,
            edges.iter().map(|(u, v)| (u, v)),
            self.model.num_activity_nodes(),
            num_unique_activities,
        )
    }

    /// Replay fitness on the original (not rebuilt) log over the expanded
    /// edge set.
    pub fn fitness(&self, log: &EventLog) -> Result<f64> {
        self.replayer(log.num_unique_activities())?.fitness(log)
    }
}

/// Edge set used to replay an aggregated model.
///
/// Every edge touching a meta-state node is replaced by edges to or from each
/// of its activities, and each meta-state node contributes its own cycle.
pub fn expanded_edges(aggregated: &AggregatedModel) -> BTreeSet<Edge> {
    let members = |node: &Node| -> Vec<Node> {
        match node.label().and_then(|l| aggregated.state_of_token(l)) {
            Some(state) => state.body().iter().cloned().map(Node::Activity).collect(),
            None => vec![node.clone()],
        }
    };
    let mut edges = BTreeSet::new();
    for (u, v) in aggregated.model.edges().keys() {
        for a in members(u) {
            for b in members(v) {
                edges.insert((a.clone(), b));
            }
        }
    }
    for label in aggregated.model.nodes().keys() {
        if let Some(state) = aggregated.state_of_token(label) {
            let body = state.body();
            for i in 0..body.len() {
                edges.insert((
                    Node::Activity(body[i].clone()),
                    Node::Activity(body[(i + 1) % body.len()].clone()),
                ));
            }
        }
    }
    edges
}

/// Discovers and aggregates models of one log; caches the significance and
/// cycle tables across rate settings.
pub struct Aggregator<'a> {
    log: &'a EventLog,
    miner: Miner<'a>,
    cycles: CycleTable,
}

impl<'a> Aggregator<'a> {
    pub fn new(log: &'a EventLog) -> Result<Self> {
        Ok(Aggregator {
            log,
            miner: Miner::new(log)?,
            cycles: cycles_search(log),
        })
    }

    pub fn log(&self) -> &EventLog {
        self.log
    }

    pub fn miner(&self) -> &Miner<'a> {
        &self.miner
    }

    pub fn cycles(&self) -> &CycleTable {
        &self.cycles
    }

    /// Meta-states of the plain model at `params`.
    pub fn states_at(&self, model: &ProcessModel, threshold: f64) -> Vec<MetaState> {
        states_in_model(&self.cycles, model, threshold)
    }

    pub fn aggregate(
        &self,
        params: RateParams,
        mode: AggregationMode,
        threshold: f64,
    ) -> Result<AggregatedModel> {
        let base = self.miner.discover(params)?;
        self.aggregate_model(base, mode, threshold)
    }

    /// Aggregates an already discovered plain model.
    pub fn aggregate_model(
        &self,
        base: ProcessModel,
        mode: AggregationMode,
        threshold: f64,
    ) -> Result<AggregatedModel> {
        check_threshold(threshold)?;
        let params = base.params();
        let plain = |base| AggregatedModel {
            model: base,
            mode,
            states: Vec::new(),
        };
        if mode == AggregationMode::None {
            return Ok(plain(base));
        }
        let found = self.states_at(&base, threshold);
        if found.is_empty() {
            return Ok(plain(base));
        }

        let order = priority(&found);
        let collapsed: Vec<Vec<Segment<'_>>> = self
            .log
            .traces()
            .iter()
            .map(|t| collapse_with(&t.events, &found, &order))
            .collect();
        // states whose every occurrence was taken by a higher-priority state
        // never show up in the rebuilt log and are dropped
        let used: BTreeSet<usize> = collapsed
            .iter()
            .flatten()
            .filter_map(|seg| match seg {
                Segment::Collapsed { state, .. } => Some(*state),
                Segment::Event(_) => None,
            })
            .collect();
        if used.is_empty() {
            return Ok(plain(base));
        }
        let states: Vec<MetaState> = used.iter().map(|&i| found[i].clone()).collect();
        let tokens: Vec<String> = found.iter().map(MetaState::token).collect();
        let token_set: BTreeSet<String> = states.iter().map(MetaState::token).collect();

        let model = match mode {
            AggregationMode::None => unreachable!(),
            AggregationMode::Outer => {
                let traces = collapsed
                    .iter()
                    .zip(self.log.traces())
                    .map(|(segments, t)| {
                        let events = segments
                            .iter()
                            .map(|seg| match seg {
                                Segment::Event(e) => e.to_string(),
                                Segment::Collapsed { state, .. } => tokens[*state].clone(),
                            })
                            .collect();
                        Trace::new(t.case_id.clone(), events)
                    })
                    .collect();
                let rebuilt = EventLog::from_traces(traces)?;
                Miner::with_tokens(&rebuilt, token_set)?.discover(params)?
            }
            AggregationMode::InnerAll | AggregationMode::InnerFreq => {
                let targets = redirect_targets(&states, mode);
                let slots = collapsed
                    .iter()
                    .map(|segments| {
                        segments
                            .iter()
                            .map(|seg| match seg {
                                Segment::Collapsed { state, .. } => vec![tokens[*state].clone()],
                                Segment::Event(e) => match targets.get(*e) {
                                    Some(redirected) => redirected.clone(),
                                    None => vec![e.to_string()],
                                },
                            })
                            .collect()
                    })
                    .collect();
                Miner::from_slots(slots, token_set)?.discover(params)?
            }
        };
        Ok(AggregatedModel {
            model,
            mode,
            states,
        })
    }
}

/// Meta-state tokens each member activity is redirected to.
fn redirect_targets(states: &[MetaState], mode: AggregationMode) -> BTreeMap<String, Vec<String>> {
    let mut targets: BTreeMap<String, Vec<&MetaState>> = BTreeMap::new();
    for state in states {
        for a in state.body() {
            targets.entry(a.clone()).or_default().push(state);
        }
    }
    targets
        .into_iter()
        .map(|(activity, containing)| {
            let chosen: Vec<String> = if mode == AggregationMode::InnerFreq {
                // most significant; ties to the smallest body
                let best = containing
                    .iter()
                    .min_by(|a, b| {
                        b.significance()
                            .total_cmp(&a.significance())
                            .then_with(|| a.body().cmp(b.body()))
                    })
                    .expect("non-empty");
                vec![best.token()]
            } else {
                containing.iter().map(|s| s.token()).collect()
            };
            (activity, chosen)
        })
        .collect()
}

fn check_threshold(threshold: f64) -> Result<()> {
    if threshold > 0.0 && threshold <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "meta-state threshold {threshold} is outside (0, 1]"
        )))
    }
}

/// Discovers the model at `params` and folds its meta-states according to `mode`.
pub fn aggregate(
    log: &EventLog,
    params: RateParams,
    mode: AggregationMode,
    threshold: f64,
) -> Result<AggregatedModel> {
    Aggregator::new(log)?.aggregate(params, mode, threshold)
}

/// A set of meta-states (by body) found together at some grid cells.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Combination {
    /// `C1`, `C2`, ... in order of first appearance on the grid.
    pub id: String,
    pub states: BTreeSet<Vec<String>>,
    /// Share of grid cells carrying this combination.
    pub coverage: f64,
}

impl Combination {
    pub fn label(&self) -> String {
        if self.states.is_empty() {
            "∅".to_string()
        } else {
            self.states
                .iter()
                .map(|b| compact_label(b))
                .collect::<Vec<_>>()
                .join("|")
        }
    }
}

/// Meta-state sets over a grid of rate settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CombinationMap {
    /// Cells sorted by `(activity_rate, transition_rate)` with the index of
    /// their combination.
    pub cells: Vec<(RateParams, usize)>,
    pub combinations: Vec<Combination>,
}

/// Meta-state set of the model discovered at each grid cell.
pub fn combination_map(
    log: &EventLog,
    grid: &[RateParams],
    threshold: f64,
) -> Result<CombinationMap> {
    check_threshold(threshold)?;
    if grid.is_empty() {
        return Err(Error::InvalidConfig("empty grid".into()));
    }
    let aggregator = Aggregator::new(log)?;
    let mut grid = grid.to_vec();
    grid.sort_by(|a, b| {
        a.activity_rate
            .total_cmp(&b.activity_rate)
            .then(a.transition_rate.total_cmp(&b.transition_rate))
    });
    let sets: Vec<BTreeSet<Vec<String>>> = grid
        .par_iter()
        .map(|params| {
            let model = aggregator.miner().discover(*params)?;
            Ok(aggregator
                .states_at(&model, threshold)
                .into_iter()
                .map(|s| s.cycle.body)
                .collect())
        })
        .collect::<Result<_>>()?;

    let mut combinations: Vec<Combination> = Vec::new();
    let mut index: BTreeMap<BTreeSet<Vec<String>>, usize> = BTreeMap::new();
    let mut counts: Vec<usize> = Vec::new();
    let mut cells = Vec::with_capacity(grid.len());
    for (params, set) in grid.iter().zip(sets) {
        let next = combinations.len();
        let idx = *index.entry(set.clone()).or_insert_with(|| {
            combinations.push(Combination {
                id: format!("C{}", next + 1),
                states: set,
                coverage: 0.0,
            });
            counts.push(0);
            next
        });
        counts[idx] += 1;
        cells.push((*params, idx));
    }
    for (c, n) in combinations.iter_mut().zip(counts) {
        c.coverage = n as f64 / grid.len() as f64;
    }
    Ok(CombinationMap {
        cells,
        combinations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CombinationEdge {
    pub from: usize,
    pub to: usize,
    /// Meta-states gained along the edge, in body order.
    pub added: Vec<Vec<String>>,
}

impl CombinationEdge {
    /// `+CF|HD`
    pub fn label(&self) -> String {
        let parts: Vec<String> = self.added.iter().map(|b| compact_label(b)).collect();
        format!("+{}", parts.join("|"))
    }
}

/// Transitions between combinations in neighbouring grid cells.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CombinationGraph {
    pub combinations: Vec<Combination>,
    pub edges: Vec<CombinationEdge>,
    /// Degree centrality per combination: (in + out degree) / (nodes - 1).
    pub centrality: Vec<f64>,
}

/// Links combination `a` to `b` when `a` is a proper subset of `b` and the
/// two occur in 4-neighbouring grid cells.
pub fn combination_graph(map: &CombinationMap) -> CombinationGraph {
    let axis = |get: fn(&RateParams) -> f64| -> Vec<f64> {
        let mut values: Vec<f64> = map.cells.iter().map(|(p, _)| get(p)).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        values
    };
    let ra_axis = axis(|p| p.activity_rate);
    let rt_axis = axis(|p| p.transition_rate);
    let position = |axis: &[f64], v: f64| axis.iter().position(|x| *x == v).expect("on axis");
    let mut grid: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (p, c) in &map.cells {
        grid.insert(
            (
                position(&ra_axis, p.activity_rate),
                position(&rt_axis, p.transition_rate),
            ),
            *c,
        );
    }

    let mut linked: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (&(i, j), &here) in &grid {
        for neighbour in [(i + 1, j), (i, j + 1)] {
            let Some(&there) = grid.get(&neighbour) else {
                continue;
            };
            let (a, b) = (
                &map.combinations[here].states,
                &map.combinations[there].states,
            );
            if a.len() < b.len() && a.is_subset(b) {
                linked.insert((here, there));
            } else if b.len() < a.len() && b.is_subset(a) {
                linked.insert((there, here));
            }
        }
    }
    let edges: Vec<CombinationEdge> = linked
        .into_iter()
        .map(|(from, to)| CombinationEdge {
            from,
            to,
            added: map.combinations[to]
                .states
                .difference(&map.combinations[from].states)
                .cloned()
                .collect(),
        })
        .collect();

    let n = map.combinations.len();
    let mut degree = vec![0usize; n];
    for e in &edges {
        degree[e.from] += 1;
        degree[e.to] += 1;
    }
    let centrality = degree
        .into_iter()
        .map(|d| {
            if n > 1 {
                d as f64 / (n - 1) as f64
            } else {
                0.0
            }
        })
        .collect();
    CombinationGraph {
        combinations: map.combinations.clone(),
        edges,
        centrality,
    }
}
