//! Replay fitness and structural complexity of a model against a log.
//!
//! A trace is replayed by projecting it onto the activities the model
//! represents. The score is the share of represented events, minus a skip
//! penalty `alpha` when any event was dropped, minus `beta * phi / n` where
//! `phi` counts consecutive pairs of the projection (plus its entry from
//! `start` and exit to `end`) that the model has no edge for. With `N` the
//! number of distinct activities in the log, `alpha = 0.5 / N` and
//! `beta = 1 / N`; `n` is the number of non-sentinel model nodes. Scores are
//! clipped at zero and averaged over traces.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::discovery::{Node, ProcessModel};
use crate::error::{Error, Result};
use crate::eventlog::{EventLog, Trace};

/// Outcome of replaying one trace.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayResult {
    /// Share of events represented by the model.
    pub coverage: f64,
    /// Whether any event was skipped.
    pub skipped: bool,
    /// Missing edges along the projected trace.
    pub forced_transitions: usize,
    /// The trace restricted to represented activities.
    pub represented: Vec<String>,
    pub score: f64,
}

const START: u32 = u32::MAX - 1;
const END: u32 = u32::MAX;

/// Precomputed lookup structure for replaying many traces against one model.
#[derive(Debug, Clone)]
pub struct Replayer {
    ids: HashMap<String, u32>,
    edges: HashSet<(u32, u32)>,
    num_nodes: usize,
    alpha: f64,
    beta: f64,
}

impl Replayer {
    /// `represented`: activities counted as covered; `edges`: edges replay
    /// may use; `num_nodes`: the `n` of the forced-transition penalty;
    /// `num_unique_activities`: the `N` of the log.
    pub fn new<'a>(
        represented: impl IntoIterator<Item = &'a str>,
        edges: impl IntoIterator<Item = (&'a Node, &'a Node)>,
        num_nodes: usize,
        num_unique_activities: usize,
    ) -> Result<Self> {
        if num_nodes == 0 {
            return Err(Error::EmptyModel);
        }
        if num_unique_activities == 0 {
            return Err(Error::EmptyLog);
        }
        let mut ids = HashMap::new();
        for label in represented {
            let next = ids.len() as u32;
            ids.entry(label.to_string()).or_insert(next);
        }
        let mut edge_ids = HashSet::new();
        for (u, v) in edges {
            let id = |n: &Node| match n {
                Node::Start => Some(START),
                Node::End => Some(END),
                Node::Activity(a) => ids.get(a).copied(),
            };
            if let (Some(u), Some(v)) = (id(u), id(v)) {
                edge_ids.insert((u, v));
            }
        }
        let big_n = num_unique_activities as f64;
        Ok(Replayer {
            ids,
            edges: edge_ids,
            num_nodes,
            alpha: 0.5 / big_n,
            beta: 1.0 / big_n,
        })
    }

    /// Replayer for a plain model: every node is represented, every edge usable.
    pub fn for_model(model: &ProcessModel, num_unique_activities: usize) -> Result<Self> {
        Self::new(
            model.nodes().keys().map(String::as_str),
            model.edges().keys().map(|(u, v)| (u, v)),
            model.num_activity_nodes(),
            num_unique_activities,
        )
    }

    pub fn replay(&self, trace: &Trace) -> Result<ReplayResult> {
        if trace.is_empty() {
            return Err(Error::EmptyTrace(trace.case_id.clone()));
        }
        let (ids, represented): (Vec<u32>, Vec<String>) = trace
            .events
            .iter()
            .filter_map(|e| self.ids.get(e).map(|id| (*id, e.clone())))
            .unzip();
        let forced = self.forced(&ids);
        let coverage = ids.len() as f64 / trace.len() as f64;
        let skipped = ids.len() < trace.len();
        let score = self.score(coverage, skipped, forced);
        Ok(ReplayResult {
            coverage,
            skipped,
            forced_transitions: forced,
            represented,
            score,
        })
    }

    fn forced(&self, ids: &[u32]) -> usize {
        let (Some(first), Some(last)) = (ids.first(), ids.last()) else {
            return 0;
        };
        let missing = |pair: (u32, u32)| usize::from(!self.edges.contains(&pair));
        missing((START, *first))
            + ids.windows(2).map(|w| missing((w[0], w[1]))).sum::<usize>()
            + missing((*last, END))
    }

    fn score(&self, coverage: f64, skipped: bool, forced: usize) -> f64 {
        let skip = if skipped { self.alpha } else { 0.0 };
        let value = coverage - skip - self.beta * forced as f64 / self.num_nodes as f64;
        value.max(0.0)
    }

    /// Mean trace score over the log, summed in trace order.
    pub fn fitness(&self, log: &EventLog) -> Result<f64> {
        let mut total = 0.0;
        let mut buf = Vec::new();
        for trace in log.traces() {
            if trace.is_empty() {
                return Err(Error::EmptyTrace(trace.case_id.clone()));
            }
            buf.clear();
            buf.extend(trace.events.iter().filter_map(|e| self.ids.get(e).copied()));
            let coverage = buf.len() as f64 / trace.len() as f64;
            total += self.score(coverage, buf.len() < trace.len(), self.forced(&buf));
        }
        Ok(total / log.num_traces() as f64)
    }
}

/// Replays one trace against a plain model.
pub fn replay_trace(
    model: &ProcessModel,
    trace: &Trace,
    num_unique_activities: usize,
) -> Result<ReplayResult> {
    Replayer::for_model(model, num_unique_activities)?.replay(trace)
}

/// Replay fitness of a plain model on a log, in `[0, 1]`.
pub fn fitness(model: &ProcessModel, log: &EventLog) -> Result<f64> {
    Replayer::for_model(model, log.num_unique_activities())?.fitness(log)
}

/// Structural complexity measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Measure {
    /// Average degree `m / n`.
    #[serde(rename = "AD")]
    AverageDegree,
    /// Entropy of the flattened adjacency matrix.
    #[serde(rename = "H")]
    Entropy,
    /// Edge density `m / (n (n - 1))`, self-loops excluded.
    #[serde(rename = "Kn")]
    Density,
    /// Mean of the node and edge ratios to the log's distinct activities and
    /// transitions, sentinels excluded.
    #[serde(rename = "R")]
    Ratio,
}

impl Measure {
    pub const ALL: [Measure; 4] = [
        Measure::AverageDegree,
        Measure::Entropy,
        Measure::Density,
        Measure::Ratio,
    ];

    pub fn symbol(&self) -> &'static str {
        match self {
            Measure::AverageDegree => "AD",
            Measure::Entropy => "H",
            Measure::Density => "Kn",
            Measure::Ratio => "R",
        }
    }

    /// Evaluates the measure on element counts, with base-2 entropy.
    pub fn evaluate(&self, counts: &GraphCounts) -> Result<f64> {
        self.evaluate_with_base(counts, 2.0)
    }

    pub fn evaluate_with_base(&self, counts: &GraphCounts, base: f64) -> Result<f64> {
        let degenerate = |reason: &str| Error::DegenerateMeasure {
            measure: self.symbol(),
            reason: reason.to_string(),
        };
        let n = counts.nodes as f64;
        match self {
            Measure::AverageDegree => {
                if counts.nodes == 0 {
                    return Err(degenerate("no nodes"));
                }
                Ok(counts.edges as f64 / n)
            }
            Measure::Entropy => {
                if counts.nodes == 0 {
                    return Err(degenerate("no nodes"));
                }
                let p = counts.edges as f64 / (n * n);
                Ok(binary_entropy(p, base))
            }
            Measure::Density => {
                if counts.nodes <= 1 {
                    return Err(degenerate("needs at least two nodes"));
                }
                Ok(counts.edges_without_loops as f64 / (n * (n - 1.0)))
            }
            Measure::Ratio => {
                if counts.log_transitions == 0 {
                    return Err(degenerate("log has no transitions"));
                }
                if counts.log_activities == 0 {
                    return Err(degenerate("log has no activities"));
                }
                Ok(0.5
                    * (counts.inner_edges as f64 / counts.log_transitions as f64
                        + counts.inner_nodes as f64 / counts.log_activities as f64))
            }
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ad" => Ok(Measure::AverageDegree),
            "h" => Ok(Measure::Entropy),
            "kn" => Ok(Measure::Density),
            "r" => Ok(Measure::Ratio),
            _ => Err(Error::InvalidConfig(format!("unknown measure `{s}`"))),
        }
    }
}

fn binary_entropy(p: f64, base: f64) -> f64 {
    let term = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log(base) };
    term(p) + term(1.0 - p)
}

/// Element counts the complexity measures are computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GraphCounts {
    /// Nodes including sentinels.
    pub nodes: usize,
    /// Edges including sentinel edges and self-loops.
    pub edges: usize,
    /// `edges` without self-loops.
    pub edges_without_loops: usize,
    /// Nodes excluding sentinels.
    pub inner_nodes: usize,
    /// Edges between non-sentinel nodes.
    pub inner_edges: usize,
    /// Distinct activities of the log.
    pub log_activities: usize,
    /// Distinct directly-follows pairs of the log.
    pub log_transitions: usize,
}

impl GraphCounts {
    /// Counts for an arbitrary directed graph given as node and edge lists.
    /// `sentinels` lists the nodes to leave out of the inner counts.
    pub fn from_graph<N: PartialEq>(
        nodes: &[N],
        edges: &[(N, N)],
        sentinels: &[N],
        log_activities: usize,
        log_transitions: usize,
    ) -> Self {
        let is_sentinel = |n: &N| sentinels.contains(n);
        GraphCounts {
            nodes: nodes.len(),
            edges: edges.len(),
            edges_without_loops: edges.iter().filter(|(u, v)| u != v).count(),
            inner_nodes: nodes.iter().filter(|n| !is_sentinel(n)).count(),
            inner_edges: edges
                .iter()
                .filter(|(u, v)| !is_sentinel(u) && !is_sentinel(v))
                .count(),
            log_activities,
            log_transitions,
        }
    }

    pub fn of_model(model: &ProcessModel, log: &EventLog) -> Self {
        let edges = model.edges().keys();
        GraphCounts {
            nodes: model.num_activity_nodes() + 2,
            edges: model.edges().len(),
            edges_without_loops: edges.clone().filter(|(u, v)| u != v).count(),
            inner_nodes: model.num_activity_nodes(),
            inner_edges: edges
                .filter(|(u, v)| !u.is_sentinel() && !v.is_sentinel())
                .count(),
            log_activities: log.num_unique_activities(),
            log_transitions: log.num_unique_transitions(),
        }
    }
}

/// Raw complexity `J` of a model.
pub fn complexity(model: &ProcessModel, measure: Measure, log: &EventLog) -> Result<f64> {
    measure.evaluate(&GraphCounts::of_model(model, log))
}

/// A complexity value together with its scaled form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexityValue {
    pub measure: Measure,
    pub raw: f64,
    pub scaled: f64,
}

/// Divides `raw` by the reference model's value and clips into `[0, 1]`.
pub fn scale_complexity(measure: Measure, raw: f64, reference: f64) -> Result<ComplexityValue> {
    if reference.is_nan() || reference <= 0.0 {
        return Err(Error::DegenerateMeasure {
            measure: measure.symbol(),
            reason: "reference model has zero complexity".into(),
        });
    }
    Ok(ComplexityValue {
        measure,
        raw,
        scaled: (raw / reference).clamp(0.0, 1.0),
    })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::discovery::{discover, EdgeInfo, NodeInfo, NodeKind, RateParams};

    fn model(nodes: &[&str], edges: &[(&str, &str)]) -> ProcessModel {
        let node = |s: &str| match s {
            "start" => Node::Start,
            "end" => Node::End,
            a => Node::activity(a),
        };
        let nodes = nodes
            .iter()
            .map(|n| {
                let info = NodeInfo {
                    kind: NodeKind::Activity,
                    significance: 1.0,
                    frequency: 1,
                };
                (n.to_string(), info)
            })
            .collect();
        let edges = edges
            .iter()
            .map(|(u, v)| {
                let info = EdgeInfo {
                    significance: 1.0,
                    frequency: 1,
                    repair: false,
                };
                ((node(u), node(v)), info)
            })
            .collect::<BTreeMap<_, _>>();
        ProcessModel::from_parts(nodes, edges, RateParams::full(), 1)
    }

    fn trace(s: &str) -> Trace {
        Trace::new("t", s.chars().map(|c| c.to_string()).collect())
    }

    #[test]
    fn perfect_replay() {
        let m = model(&["A", "B"], &[("start", "A"), ("A", "B"), ("B", "end")]);
        let r = replay_trace(&m, &trace("AB"), 2).unwrap();
        assert_eq!(r.score, 1.0);
        assert_eq!(r.forced_transitions, 0);
        assert!(!r.skipped);
    }

    #[test]
    fn skipped_event_costs_coverage_and_alpha() {
        let m = model(&["A", "C"], &[("start", "A"), ("A", "C"), ("C", "end")]);
        let r = replay_trace(&m, &trace("ABC"), 3).unwrap();
        assert!((r.coverage - 2.0 / 3.0).abs() < 1e-15);
        assert!(r.skipped);
        assert_eq!(r.forced_transitions, 0);
        assert_eq!(r.represented, vec!["A", "C"]);
        assert!((r.score - 0.5).abs() < 1e-12);
    }

    #[test]
    fn missing_edge_is_forced() {
        let m = model(&["A", "B"], &[("start", "A"), ("B", "end")]);
        let r = replay_trace(&m, &trace("AB"), 2).unwrap();
        assert_eq!(r.forced_transitions, 1);
        assert!((r.score - 0.75).abs() < 1e-12);
    }

    #[test]
    fn missing_start_and_end_edges_count() {
        let m = model(&["A"], &[]);
        let r = replay_trace(&m, &trace("A"), 1).unwrap();
        assert_eq!(r.forced_transitions, 2);
        assert_eq!(r.score, 0.0);
    }

    #[test]
    fn nothing_represented() {
        let m = model(&["A"], &[("start", "A"), ("A", "end")]);
        let r = replay_trace(&m, &trace("BB"), 2).unwrap();
        assert_eq!(r.coverage, 0.0);
        assert_eq!(r.forced_transitions, 0);
        assert_eq!(r.score, 0.0);
    }

    #[test]
    fn replay_errors() {
        let m = model(&["A"], &[]);
        assert!(matches!(
            replay_trace(&m, &Trace::new("x", vec![]), 1),
            Err(Error::EmptyTrace(_))
        ));
        let empty = model(&[], &[("start", "end")]);
        assert!(matches!(
            replay_trace(&empty, &trace("A"), 1),
            Err(Error::EmptyModel)
        ));
    }

    #[test]
    fn fitness_with_one_missing_interior_edge() {
        // N = 3, n = 3: every trace forced once -> 1 - (1/3)/3
        let m = model(
            &["A", "B", "C"],
            &[("start", "A"), ("A", "B"), ("C", "end")],
        );
        let log = EventLog::from_sequences(&vec![vec!["A", "B", "C"]; 4]).unwrap();
        let f = fitness(&m, &log).unwrap();
        assert!((f - (1.0 - 1.0 / 9.0)).abs() < 1e-12);
        assert_eq!(
            Replayer::for_model(&m, 3)
                .unwrap()
                .replay(&log.traces()[0])
                .unwrap()
                .score,
            f
        );
    }

    #[test]
    fn full_model_has_unit_fitness() {
        let log =
            EventLog::from_sequences(&[vec!["A", "B", "A", "C"], vec!["C"], vec!["B", "B", "D"]])
                .unwrap();
        let m = discover(&log, RateParams::full()).unwrap();
        assert_eq!(fitness(&m, &log).unwrap(), 1.0);
    }

    #[test]
    fn measures_on_small_model() {
        // start->A->B->end plus B->B: n = 4, m = 4
        let m = model(
            &["A", "B"],
            &[("start", "A"), ("A", "B"), ("B", "B"), ("B", "end")],
        );
        let log = EventLog::from_sequences(&[vec!["A", "B", "B"], vec!["A", "C"]]).unwrap();
        assert_eq!(complexity(&m, Measure::AverageDegree, &log).unwrap(), 1.0);
        let p: f64 = 4.0 / 16.0;
        let h = -p * p.log2() - (1.0 - p) * (1.0 - p).log2();
        assert!((complexity(&m, Measure::Entropy, &log).unwrap() - h).abs() < 1e-12);
        assert_eq!(complexity(&m, Measure::Density, &log).unwrap(), 3.0 / 12.0);
        // inner: nodes 2 of N = 3, edges {A->B, B->B} of M = 3
        assert!(
            (complexity(&m, Measure::Ratio, &log).unwrap() - 0.5 * (2.0 / 3.0 + 2.0 / 3.0)).abs()
                < 1e-12
        );
    }

    #[test]
    fn degenerate_measures() {
        let one = GraphCounts {
            nodes: 1,
            ..GraphCounts::default()
        };
        assert!(Measure::Density.evaluate(&one).is_err());
        assert!(Measure::Ratio.evaluate(&one).is_err());
        assert!(Measure::AverageDegree
            .evaluate(&GraphCounts::default())
            .is_err());
    }

    #[test]
    fn complete_graph_anchors() {
        let nodes: Vec<u32> = (0..5).collect();
        let edges: Vec<(u32, u32)> = nodes
            .iter()
            .flat_map(|u| nodes.iter().map(move |v| (*u, *v)))
            .collect();
        let counts = GraphCounts::from_graph(&nodes, &edges, &[], 5, 25);
        assert_eq!(Measure::Density.evaluate(&counts).unwrap(), 1.0);
        assert!(Measure::Entropy.evaluate(&counts).unwrap().abs() < 1e-12);
    }

    #[test]
    fn scaling() {
        let v = scale_complexity(Measure::AverageDegree, 1.5, 3.0).unwrap();
        assert_eq!(v.scaled, 0.5);
        assert_eq!(
            scale_complexity(Measure::Entropy, 2.0, 2.0).unwrap().scaled,
            1.0
        );
        assert_eq!(
            scale_complexity(Measure::Density, 0.9, 0.3).unwrap().scaled,
            1.0
        );
        assert!(scale_complexity(Measure::Entropy, 0.1, 0.0).is_err());
    }

    #[test]
    fn entropy_scaling_ignores_base() {
        let a = GraphCounts {
            nodes: 7,
            edges: 12,
            ..GraphCounts::default()
        };
        let b = GraphCounts {
            nodes: 9,
            edges: 30,
            ..GraphCounts::default()
        };
        let ratio = |base| {
            Measure::Entropy.evaluate_with_base(&a, base).unwrap()
                / Measure::Entropy.evaluate_with_base(&b, base).unwrap()
        };
        assert!((ratio(2.0) - ratio(std::f64::consts::E)).abs() < 1e-12);
    }

    #[test]
    fn measure_names() {
        for m in Measure::ALL {
            assert_eq!(m.symbol().parse::<Measure>().unwrap(), m);
        }
        assert!("xyz".parse::<Measure>().is_err());
    }
}
