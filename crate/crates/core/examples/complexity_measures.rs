//! The four complexity measures on a sequence of increasingly filtered maps.

use procmap::quality::{scale_complexity, GraphCounts};
use procmap::synthetic::{random_log, RandomLogShape};
use procmap::{discover, Measure, RateParams};

fn main() -> procmap::Result<()> {
    let log = random_log(
        7,
        RandomLogShape {
            cases: 200,
            max_len: 15,
            alphabet: 8,
        },
    )?;
    let full = GraphCounts::of_model(&discover(&log, RateParams::full())?, &log);
    println!(
        "{:>9}  {:>6}  {:>6}  {:>6}  {:>6}",
        "rates", "AD", "H", "Kn", "R"
    );
    for rate in [100.0, 75.0, 50.0, 25.0, 0.0] {
        let params = RateParams::new(100.0, rate)?;
        let counts = GraphCounts::of_model(&discover(&log, params)?, &log);
        let mut row = format!("{:>9}", params.to_string());
        for measure in Measure::ALL {
            let raw = measure.evaluate(&counts)?;
            let scaled = scale_complexity(measure, raw, measure.evaluate(&full)?)?;
            row.push_str(&format!("  {:>6.3}", scaled.scaled));
        }
        println!("{row}");
    }
    Ok(())
}
