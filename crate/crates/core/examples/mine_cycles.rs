//! Cycles of a log and the ones that qualify as meta-states.

use procmap::export::{cycle_report, cycle_report_text};
use procmap::{cycles_search, EventLog};

fn main() -> procmap::Result<()> {
    let log = EventLog::from_sequences(&[
        vec!["A", "B", "C", "B", "E"],
        vec!["A", "B", "C", "D", "B", "E"],
        vec!["A", "B", "C", "B", "C", "D", "B", "E"],
        vec!["A", "C", "D", "E"],
        vec!["A", "B", "C", "D", "B", "C", "B", "E"],
    ])?;
    let cycles = cycles_search(&log);
    print!("{}", cycle_report_text(&cycle_report(&cycles, 0.5)));
    Ok(())
}
