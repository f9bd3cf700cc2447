//! Seeded synthetic event logs.
//!
//! A generator model is a weighted directed graph between `start`, `end`
//! and activities. Each case is a random walk from `start` that picks the
//! next node with probability proportional to the edge weights and stops on
//! reaching `end`.

use std::collections::{BTreeMap, BTreeSet};

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::discovery::Node;
use crate::error::{Error, Result};
use crate::eventlog::{EventLog, Trace};

/// Longest walk before generation gives up.
pub const MAX_WALK: usize = 100_000;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct GeneratorModel {
    out: BTreeMap<Node, Vec<(Node, f64)>>,
}

impl GeneratorModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn edge(mut self, from: Node, to: Node, weight: f64) -> Self {
        self.add_edge(from, to, weight);
        self
    }

    pub fn add_edge(&mut self, from: Node, to: Node, weight: f64) {
        self.out.entry(from).or_default().push((to, weight));
    }

    /// Edge between two labels, where `"start"` and `"end"` name the sentinels.
    pub fn link(self, from: &str, to: &str, weight: f64) -> Self {
        let node = |s: &str| match s {
            "start" => Node::Start,
            "end" => Node::End,
            a => Node::activity(a),
        };
        self.edge(node(from), node(to), weight)
    }

    /// `start -> a1 -> ... -> ak -> end` with unit weights.
    pub fn chain<S: AsRef<str>>(activities: &[S]) -> Self {
        let mut model = Self::new();
        let mut prev = Node::Start;
        for a in activities {
            let next = Node::activity(a.as_ref());
            model.add_edge(prev, next.clone(), 1.0);
            prev = next;
        }
        model.add_edge(prev, Node::End, 1.0);
        model
    }

    pub fn successors(&self, node: &Node) -> &[(Node, f64)] {
        self.out.get(node).map(Vec::as_slice).unwrap_or(&[])
    }

    fn validate(&self) -> Result<()> {
        for (from, targets) in &self.out {
            if *from == Node::End {
                return Err(Error::Generation("`end` has outgoing edges".into()));
            }
            for (to, w) in targets {
                if *to == Node::Start {
                    return Err(Error::Generation("`start` has incoming edges".into()));
                }
                if !(w.is_finite() && *w > 0.0) {
                    return Err(Error::Generation(format!(
                        "edge {from} -> {to} has non-positive weight {w}"
                    )));
                }
            }
        }
        // every node a walk can visit must still be able to finish
        let mut reachable = BTreeSet::from([Node::Start]);
        let mut stack = vec![Node::Start];
        while let Some(n) = stack.pop() {
            for (to, _) in self.successors(&n) {
                if reachable.insert(to.clone()) {
                    stack.push(to.clone());
                }
            }
        }
        if !reachable.contains(&Node::End) {
            return Err(Error::Generation("no path from start to end".into()));
        }
        let mut finishing = BTreeSet::from([Node::End]);
        loop {
            let before = finishing.len();
            for (from, targets) in &self.out {
                if targets.iter().any(|(t, _)| finishing.contains(t)) {
                    finishing.insert(from.clone());
                }
            }
            if finishing.len() == before {
                break;
            }
        }
        if let Some(stuck) = reachable.iter().find(|n| !finishing.contains(n)) {
            return Err(Error::Generation(format!("node {stuck} cannot reach end")));
        }
        Ok(())
    }
}

/// Generates `num_cases` traces; the same seed gives the same log.
pub fn generate_synthetic(model: &GeneratorModel, seed: u64, num_cases: usize) -> Result<EventLog> {
    if num_cases == 0 {
        return Err(Error::EmptyLog);
    }
    model.validate()?;
    let choices: BTreeMap<&Node, (Vec<&Node>, WeightedIndex<f64>)> = model
        .out
        .iter()
        .map(|(from, targets)| {
            let nodes = targets.iter().map(|(n, _)| n).collect();
            let dist = WeightedIndex::new(targets.iter().map(|(_, w)| *w))
                .map_err(|e| Error::Generation(e.to_string()))?;
            Ok((from, (nodes, dist)))
        })
        .collect::<Result<_>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut traces = Vec::with_capacity(num_cases);
    for case in 0..num_cases {
        let mut events = Vec::new();
        let mut at = &Node::Start;
        loop {
            let (nodes, dist) = &choices[at];
            at = nodes[dist.sample(&mut rng)];
            match at {
                Node::End => break,
                Node::Activity(a) => events.push(a.clone()),
                Node::Start => unreachable!("validated"),
            }
            if events.len() > MAX_WALK {
                return Err(Error::Generation(format!(
                    "walk exceeded {MAX_WALK} events"
                )));
            }
        }
        if events.is_empty() {
            return Err(Error::Generation(
                "model allows the empty trace start -> end".into(),
            ));
        }
        traces.push(Trace::new(format!("case{}", case + 1), events));
    }
    EventLog::from_traces(traces)
}

/// Shape of a random log.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomLogShape {
    pub cases: usize,
    pub max_len: usize,
    pub alphabet: usize,
}

/// Activity names used by [`random_log`]: `A`..`Z`, then `A1`, `B1`, ...
pub fn activity_name(i: usize) -> String {
    let letter = (b'A' + (i % 26) as u8) as char;
    if i < 26 {
        letter.to_string()
    } else {
        format!("{letter}{}", i / 26)
    }
}

/// A log drawn from a random first-order Markov chain over `alphabet`
/// activities; walks are cut at `max_len` events.
///
/// Each seed also randomizes how sparse the chain is, so different seeds give
/// structurally different logs.
pub fn random_log(seed: u64, shape: RandomLogShape) -> Result<EventLog> {
    if shape.cases == 0 || shape.max_len == 0 || shape.alphabet == 0 {
        return Err(Error::EmptyLog);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = shape.alphabet;
    let density: f64 = rng.gen_range(0.15..0.8);
    let stop: f64 = rng.gen_range(0.05..0.35);
    // row k is the start distribution
    let rows: Vec<Vec<f64>> = (0..=k)
        .map(|_| {
            let mut row: Vec<f64> = (0..k)
                .map(|_| {
                    if rng.gen_bool(density) {
                        rng.gen_range(0.05..1.0)
                    } else {
                        0.0
                    }
                })
                .collect();
            if row.iter().all(|w| *w == 0.0) {
                let j = rng.gen_range(0..k);
                row[j] = 1.0;
            }
            row
        })
        .collect();
    let dists: Vec<WeightedIndex<f64>> = rows
        .iter()
        .map(|r| WeightedIndex::new(r).expect("row has a positive weight"))
        .collect();

    let traces = (0..shape.cases)
        .map(|case| {
            let mut events = Vec::new();
            let mut at = k;
            loop {
                at = dists[at].sample(&mut rng);
                events.push(activity_name(at));
                if events.len() >= shape.max_len || rng.gen_bool(stop) {
                    break;
                }
            }
            Trace::new(format!("case{}", case + 1), events)
        })
        .collect();
    EventLog::from_traces(traces)
}
