//! Folding the loops of a model into meta-state nodes under each mode.

use procmap::metastates::rebuild_log;
use procmap::{aggregate, AggregationMode, EventLog, RateParams};

fn main() -> procmap::Result<()> {
    let mut traces = Vec::new();
    traces.extend(std::iter::repeat_n(vec!["A", "B", "C", "B", "E"], 3));
    traces.extend(std::iter::repeat_n(vec!["A", "B", "C", "D", "B", "E"], 4));
    traces.extend(std::iter::repeat_n(
        vec!["A", "B", "C", "B", "C", "D", "B", "E"],
        3,
    ));
    traces.push(vec!["A", "C", "D", "E"]);
    let log = EventLog::from_sequences(&traces)?;

    for mode in AggregationMode::ALL {
        let m = aggregate(&log, RateParams::full(), mode, 0.5)?;
        println!("{mode}: fitness {:.4}", m.fitness(&log)?);
        let nodes: Vec<&str> = m.model.nodes().keys().map(String::as_str).collect();
        println!("  nodes: {}", nodes.join(", "));
        for (from, to) in m.model.edges().keys() {
            println!("  {from} -> {to}");
        }
        if mode == AggregationMode::Outer {
            for trace in rebuild_log(&log, &m.states)?.traces().iter().step_by(3) {
                println!("  rebuilt: {}", trace.events.join(" "));
            }
        }
    }
    Ok(())
}
