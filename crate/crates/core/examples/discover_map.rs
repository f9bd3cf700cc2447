//! Parse a CSV event log and print process maps at two rate settings.

use procmap::render::render_model;
use procmap::{discover, parse_log, AggregatedModel, LogFormat, RateParams};

const LOG: &str = "\
case_id,activity,timestamp
1,register,2024-03-01T09:00:00
1,check,2024-03-01T09:05:00
1,approve,2024-03-01T09:30:00
2,register,2024-03-01T10:00:00
2,approve,2024-03-01T10:40:00
2,check,2024-03-01T10:20:00
3,register,2024-03-02T08:00:00
3,check,2024-03-02T08:10:00
3,reject,2024-03-02T08:50:00
4,register,2024-03-02T11:00:00
4,escalate,2024-03-02T11:05:00
4,check,2024-03-02T11:30:00
4,approve,2024-03-02T12:00:00
";

fn main() -> procmap::Result<()> {
    // rows are sorted by timestamp within each case
    let log = parse_log(LOG.as_bytes(), &LogFormat::default())?;
    println!(
        "{} cases, {} activities, {} transitions",
        log.num_traces(),
        log.num_unique_activities(),
        log.num_unique_transitions()
    );

    let full = discover(&log, RateParams::full())?;
    println!(
        "full map: {} nodes, {} edges",
        full.nodes().len(),
        full.edges().len()
    );

    // keep activities in at least half of the cases, no extra transitions
    let params = RateParams::new(50.0, 0.0)?;
    let simple = discover(&log, params)?;
    for ((from, to), edge) in simple.edges() {
        let kind = if edge.repair { " (repair)" } else { "" };
        println!("  {from} -> {to}: {} occurrences{kind}", edge.frequency);
    }
    print!("{}", render_model(&AggregatedModel::plain(simple)));
    Ok(())
}
