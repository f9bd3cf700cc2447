//! JSON model documents and CSV reports.
//!
//! Floating-point values are written with six significant digits.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize, Serializer};

use crate::discovery::{EdgeInfo, Node, NodeInfo, NodeKind, ProcessModel, RateParams};
use crate::error::Result;
use crate::metastates::{
    AggregatedModel, AggregationMode, CombinationMap, Cycle, CycleTable, MetaState,
};
use crate::optimizer::Landscape;

/// Rounds to six significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.5e}").parse().unwrap_or(x)
}

/// Shortest decimal text of `x` rounded to six significant digits.
pub fn fmt_number(x: f64) -> String {
    let rounded = round_sig(x);
    if rounded == 0.0 {
        return "0".into();
    }
    if rounded.abs() >= 1e15 || rounded.abs() < 1e-5 {
        return format!("{rounded:e}");
    }
    // Display of f64 is the shortest representation that round-trips
    format!("{rounded}")
}

fn ser_sig<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(round_sig(*x))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatesDoc {
    #[serde(serialize_with = "ser_sig")]
    pub activity_rate: f64,
    #[serde(serialize_with = "ser_sig")]
    pub transition_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeDoc {
    pub label: String,
    pub kind: NodeKind,
    #[serde(serialize_with = "ser_sig")]
    pub significance: f64,
    pub frequency: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub from: Node,
    pub to: Node,
    #[serde(serialize_with = "ser_sig")]
    pub significance: f64,
    pub frequency: usize,
    pub repair: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaStateDoc {
    pub token: String,
    pub body: Vec<String>,
    pub abs_freq: usize,
    pub case_count: usize,
    #[serde(serialize_with = "ser_sig")]
    pub significance: f64,
}

/// Serialized form of a (possibly aggregated) process model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub params: RatesDoc,
    pub num_traces: usize,
    pub aggregation: AggregationMode,
    pub nodes: Vec<NodeDoc>,
    pub edges: Vec<EdgeDoc>,
    #[serde(default)]
    pub meta_states: Vec<MetaStateDoc>,
}

impl ModelDocument {
    pub fn from_model(aggregated: &AggregatedModel) -> Self {
        let model = &aggregated.model;
        let params = model.params();
        ModelDocument {
            params: RatesDoc {
                activity_rate: params.activity_rate,
                transition_rate: params.transition_rate,
            },
            num_traces: model.num_traces(),
            aggregation: aggregated.mode,
            nodes: model
                .nodes()
                .iter()
                .map(|(label, info)| NodeDoc {
                    label: label.clone(),
                    kind: info.kind,
                    significance: info.significance,
                    frequency: info.frequency,
                })
                .collect(),
            edges: model
                .edges()
                .iter()
                .map(|((from, to), info)| EdgeDoc {
                    from: from.clone(),
                    to: to.clone(),
                    significance: info.significance,
                    frequency: info.frequency,
                    repair: info.repair,
                })
                .collect(),
            meta_states: aggregated
                .states
                .iter()
                .map(|s| MetaStateDoc {
                    token: s.token(),
                    body: s.body().to_vec(),
                    abs_freq: s.cycle.abs_freq,
                    case_count: s.cycle.case_count,
                    significance: s.significance(),
                })
                .collect(),
        }
    }

    pub fn to_model(&self) -> Result<AggregatedModel> {
        let params = RateParams::new(self.params.activity_rate, self.params.transition_rate)?;
        let nodes: BTreeMap<String, NodeInfo> = self
            .nodes
            .iter()
            .map(|n| {
                let info = NodeInfo {
                    kind: n.kind,
                    significance: n.significance,
                    frequency: n.frequency,
                };
                (n.label.clone(), info)
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let info = EdgeInfo {
                    significance: e.significance,
                    frequency: e.frequency,
                    repair: e.repair,
                };
                ((e.from.clone(), e.to.clone()), info)
            })
            .collect();
        let states = self
            .meta_states
            .iter()
            .map(|s| MetaState {
                cycle: Cycle {
                    body: s.body.clone(),
                    abs_freq: s.abs_freq,
                    case_count: s.case_count,
                    significance: s.significance,
                },
            })
            .collect();
        Ok(AggregatedModel {
            model: ProcessModel::from_parts(nodes, edges, params, self.num_traces),
            mode: self.aggregation,
            states,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

pub fn model_to_json(aggregated: &AggregatedModel) -> Result<String> {
    ModelDocument::from_model(aggregated).to_json()
}

pub fn model_from_json(text: &str) -> Result<AggregatedModel> {
    ModelDocument::from_json(text)?.to_model()
}

pub const LANDSCAPE_COLUMNS: [&str; 8] = [
    "r_a",
    "r_t",
    "fitness",
    "complexity_scaled",
    "objective",
    "nodes",
    "edges",
    "meta_states",
];

/// One row per cell, ordered by `r_a` then `r_t`.
pub fn write_landscape<W: Write>(landscape: &Landscape, writer: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(LANDSCAPE_COLUMNS)?;
    let mut cells: Vec<_> = landscape.cells.iter().collect();
    cells.sort_by(|a, b| {
        a.params
            .activity_rate
            .total_cmp(&b.params.activity_rate)
            .then(
                a.params
                    .transition_rate
                    .total_cmp(&b.params.transition_rate),
            )
    });
    for c in cells {
        out.write_record([
            fmt_number(c.params.activity_rate),
            fmt_number(c.params.transition_rate),
            fmt_number(c.fitness),
            fmt_number(c.complexity_scaled),
            fmt_number(c.objective),
            c.nodes.to_string(),
            c.edges.to_string(),
            c.meta_states.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Optimum of a landscape as text, ending with an `r_a,r_t,F,J` row.
pub fn landscape_summary(landscape: &Landscape) -> String {
    let best = landscape.best();
    let config = &landscape.config;
    format!(
        "measure: {}\nlambda: {}\ngrid step: {}\naggregation: {}\ncells: {}\n\
         optimum: r_a={} r_t={} objective={}\n\
         r_a,r_t,F,J\n{},{},{},{}\n",
        config.measure,
        fmt_number(config.lambda),
        config.grid_step,
        config.mode,
        landscape.cells.len(),
        fmt_number(best.params.activity_rate),
        fmt_number(best.params.transition_rate),
        fmt_number(best.objective),
        fmt_number(best.params.activity_rate),
        fmt_number(best.params.transition_rate),
        fmt_number(best.fitness),
        fmt_number(best.complexity_raw),
    )
}

/// Cycle report row.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleRow {
    pub cycle: Cycle,
    pub meta_state: bool,
}

/// Every cycle with its meta-state verdict, by significance descending,
/// then body.
pub fn cycle_report(cycles: &CycleTable, threshold: f64) -> Vec<CycleRow> {
    let mut rows: Vec<CycleRow> = cycles
        .cycles()
        .into_iter()
        .map(|cycle| {
            let meta_state = cycle.body.len() > 1
                && cycle.case_count as f64 >= threshold * cycles.num_traces() as f64;
            CycleRow { cycle, meta_state }
        })
        .collect();
    rows.sort_by(|a, b| {
        b.cycle
            .significance
            .total_cmp(&a.cycle.significance)
            .then_with(|| a.cycle.body.cmp(&b.cycle.body))
    });
    rows
}

pub fn write_cycle_report<W: Write>(rows: &[CycleRow], writer: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record([
        "cycle",
        "abs_freq",
        "case_freq",
        "significance",
        "meta_state",
    ])?;
    for row in rows {
        out.write_record([
            row.cycle.token(),
            row.cycle.abs_freq.to_string(),
            row.cycle.case_count.to_string(),
            fmt_number(row.cycle.significance),
            if row.meta_state { "yes" } else { "no" }.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Aligned plain-text version of the cycle report.
pub fn cycle_report_text(rows: &[CycleRow]) -> String {
    let width = rows
        .iter()
        .map(|r| r.cycle.token().chars().count())
        .max()
        .unwrap_or(0)
        .max(5);
    let mut text = format!(
        "{:<width$}  {:>8}  {:>8}  {:>12}  meta-state\n",
        "cycle", "abs", "cases", "significance"
    );
    for row in rows {
        text.push_str(&format!(
            "{:<width$}  {:>8}  {:>8}  {:>12}  {}\n",
            row.cycle.token(),
            row.cycle.abs_freq,
            row.cycle.case_count,
            fmt_number(row.cycle.significance),
            if row.meta_state { "yes" } else { "no" }
        ));
    }
    text
}

/// `r_a,r_t,combination` rows in grid order.
pub fn write_combination_map<W: Write>(map: &CombinationMap, writer: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["r_a", "r_t", "combination", "meta_states"])?;
    for (params, idx) in &map.cells {
        let combo = &map.combinations[*idx];
        out.write_record([
            fmt_number(params.activity_rate),
            fmt_number(params.transition_rate),
            combo.id.clone(),
            combo.label(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discovery::discover;
    use crate::eventlog::EventLog;
    use crate::metastates::cycles_search;

    #[test]
    fn number_formatting() {
        assert_eq!(fmt_number(0.0), "0");
        assert_eq!(fmt_number(1.0), "1");
        assert_eq!(fmt_number(100.0), "100");
        assert_eq!(fmt_number(2.0 / 3.0), "0.666667");
        assert_eq!(fmt_number(0.9999996), "1");
        assert_eq!(fmt_number(123456789.0), "123457000");
        assert_eq!(fmt_number(0.4), "0.4");
        assert_eq!(fmt_number(1.0 / 3.0 * 1e-7), "3.33333e-8");
    }

    #[test]
    fn json_round_trip() {
        let log =
            EventLog::from_sequences(&[vec!["A", "B", "C"], vec!["A", "C"], vec!["A", "B", "B"]])
                .unwrap();
        let model = discover(&log, RateParams::new(60.0, 30.0).unwrap()).unwrap();
        let json = model_to_json(&AggregatedModel::plain(model)).unwrap();
        let again = model_to_json(&model_from_json(&json).unwrap()).unwrap();
        assert_eq!(json, again);
        assert!(json.contains("\"significance\": 0.666667"));
        assert!(json.contains("\"from\": \"start\""));
    }

    #[test]
    fn cycle_report_ordering_and_verdict() {
        let log =
            EventLog::from_sequences(&[vec!["A", "B", "A"], vec!["A", "B", "A"], vec!["A", "C"]])
                .unwrap();
        let rows = cycle_report(&cycles_search(&log), 0.5);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].cycle.body, vec!["A", "B"]);
        assert_eq!((rows[0].cycle.abs_freq, rows[0].cycle.case_count), (2, 2));
        assert!(rows[0].meta_state);
        assert!(!cycle_report(&cycles_search(&log), 0.7)[0].meta_state);

        let mut buf = Vec::new();
        write_cycle_report(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "cycle,abs_freq,case_freq,significance,meta_state\n[A·B],2,2,0.666667,yes\n"
        );
    }
}
