//! Replay fitness of a filtered map, trace by trace.

use procmap::quality::Replayer;
use procmap::{discover, EventLog, RateParams};

fn main() -> procmap::Result<()> {
    let log = EventLog::from_sequences(&[
        vec!["A", "B", "D"],
        vec!["A", "B", "D"],
        vec!["A", "C", "D"],
        vec!["A", "B", "C", "D"],
    ])?;
    for rates in [(100.0, 100.0), (100.0, 0.0), (50.0, 0.0)] {
        let params = RateParams::new(rates.0, rates.1)?;
        let model = discover(&log, params)?;
        let replayer = Replayer::for_model(&model, log.num_unique_activities())?;
        println!("rates {params}: fitness {:.4}", replayer.fitness(&log)?);
        for trace in log.traces() {
            let r = replayer.replay(trace)?;
            println!(
                "  {:<10} coverage {:.2}  forced {}  score {:.4}",
                trace.events.join(" "),
                r.coverage,
                r.forced_transitions,
                r.score
            );
        }
    }
    Ok(())
}
