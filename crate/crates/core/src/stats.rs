//! Absolute and case frequencies of log elements.
//!
//! The significance of an activity or transition is its case frequency: the
//! fraction of traces that contain it at least once. Absolute frequencies
//! count every occurrence and are only used for display.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::eventlog::EventLog;

/// Occurrence counts of one log element.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Frequency {
    /// Number of traces containing the element.
    pub cases: usize,
    /// Number of occurrences over the whole log.
    pub total: usize,
}

impl Frequency {
    pub fn case_frequency(&self, num_traces: usize) -> f64 {
        self.cases as f64 / num_traces as f64
    }
}

/// Frequencies of activities, transitions and start/end positions.
///
/// Elements that never occur have no entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignificanceTable {
    num_traces: usize,
    activities: BTreeMap<String, Frequency>,
    transitions: BTreeMap<(String, String), Frequency>,
    starts: BTreeMap<String, Frequency>,
    ends: BTreeMap<String, Frequency>,
}

impl SignificanceTable {
    pub fn num_traces(&self) -> usize {
        self.num_traces
    }

    pub fn activities(&self) -> &BTreeMap<String, Frequency> {
        &self.activities
    }

    pub fn transitions(&self) -> &BTreeMap<(String, String), Frequency> {
        &self.transitions
    }

    pub fn starts(&self) -> &BTreeMap<String, Frequency> {
        &self.starts
    }

    pub fn ends(&self) -> &BTreeMap<String, Frequency> {
        &self.ends
    }

    pub fn activity_significance(&self, activity: &str) -> Option<f64> {
        self.activities
            .get(activity)
            .map(|f| f.case_frequency(self.num_traces))
    }

    pub fn transition_significance(&self, from: &str, to: &str) -> Option<f64> {
        self.transitions
            .get(&(from.to_string(), to.to_string()))
            .map(|f| f.case_frequency(self.num_traces))
    }

    pub fn start_significance(&self, activity: &str) -> Option<f64> {
        self.starts
            .get(activity)
            .map(|f| f.case_frequency(self.num_traces))
    }

    pub fn end_significance(&self, activity: &str) -> Option<f64> {
        self.ends
            .get(activity)
            .map(|f| f.case_frequency(self.num_traces))
    }
}

/// Accumulates a [`SignificanceTable`] trace by trace.
///
/// Besides plain traces it accepts "slot" traces, where each position holds a
/// set of labels at once. Aggregated models use them to redirect one hidden
/// activity to several meta-states.
#[derive(Debug, Default)]
pub struct TableBuilder {
    num_traces: usize,
    activities: BTreeMap<String, Frequency>,
    transitions: BTreeMap<(String, String), Frequency>,
    starts: BTreeMap<String, Frequency>,
    ends: BTreeMap<String, Frequency>,
}

impl TableBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_trace<S: AsRef<str>>(&mut self, events: &[S]) {
        let slots: Vec<Vec<&str>> = events.iter().map(|e| vec![e.as_ref()]).collect();
        self.add_slots(&slots, |_| false);
    }

    /// Adds one trace of label sets. Pairs `(x, x)` between consecutive slots
    /// are skipped when `absorbs_self_loop(x)` holds.
    pub fn add_slots<S: AsRef<str>>(
        &mut self,
        slots: &[Vec<S>],
        absorbs_self_loop: impl Fn(&str) -> bool,
    ) {
        let slots: Vec<&Vec<S>> = slots.iter().filter(|s| !s.is_empty()).collect();
        if slots.is_empty() {
            return;
        }
        self.num_traces += 1;

        let mut seen_activities = BTreeSet::new();
        for slot in &slots {
            for label in slot.iter() {
                let label = label.as_ref();
                let freq = self.activities.entry(label.to_string()).or_default();
                freq.total += 1;
                if seen_activities.insert(label) {
                    freq.cases += 1;
                }
            }
        }

        let mut seen_pairs = BTreeSet::new();
        for pair in slots.windows(2) {
            for from in pair[0].iter() {
                for to in pair[1].iter() {
                    let (from, to) = (from.as_ref(), to.as_ref());
                    if from == to && absorbs_self_loop(from) {
                        continue;
                    }
                    let freq = self
                        .transitions
                        .entry((from.to_string(), to.to_string()))
                        .or_default();
                    freq.total += 1;
                    if seen_pairs.insert((from, to)) {
                        freq.cases += 1;
                    }
                }
            }
        }

        let bump = |map: &mut BTreeMap<String, Frequency>, slot: &Vec<S>| {
            let labels: BTreeSet<&str> = slot.iter().map(|s| s.as_ref()).collect();
            for label in labels {
                let freq = map.entry(label.to_string()).or_default();
                freq.total += 1;
                freq.cases += 1;
            }
        };
        bump(&mut self.starts, slots[0]);
        bump(&mut self.ends, slots[slots.len() - 1]);
    }

    pub fn finish(self) -> Result<SignificanceTable> {
        if self.num_traces == 0 {
            return Err(Error::EmptyLog);
        }
        Ok(SignificanceTable {
            num_traces: self.num_traces,
            activities: self.activities,
            transitions: self.transitions,
            starts: self.starts,
            ends: self.ends,
        })
    }
}

/// Computes activity, transition and start/end frequencies of a log.
pub fn compute_significance(log: &EventLog) -> Result<SignificanceTable> {
    let mut builder = TableBuilder::new();
    for trace in log.traces() {
        builder.add_trace(&trace.events);
    }
    builder.finish()
}

/// Two activities observed following each other in both orders.
#[derive(Debug, Clone, PartialEq)]
pub struct ConflictPair {
    /// Lexicographically smaller activity.
    pub first: String,
    pub second: String,
    /// Case frequency of `first -> second`.
    pub forward: f64,
    /// Case frequency of `second -> first`.
    pub backward: f64,
}

/// All unordered pairs `{a, b}`, `a != b`, with both `a -> b` and `b -> a` in the log.
pub fn conflict_pairs(table: &SignificanceTable) -> Vec<ConflictPair> {
    let n = table.num_traces();
    table
        .transitions()
        .iter()
        .filter(|((a, b), _)| a < b)
        .filter_map(|((a, b), forward)| {
            table
                .transitions()
                .get(&(b.clone(), a.clone()))
                .map(|backward| ConflictPair {
                    first: a.clone(),
                    second: b.clone(),
                    forward: forward.case_frequency(n),
                    backward: backward.case_frequency(n),
                })
        })
        .collect()
}
