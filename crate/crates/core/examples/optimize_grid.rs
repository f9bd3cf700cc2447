//! Grid search of the rates for each complexity measure, then the landscape
//! as CSV for one of them.

use procmap::export::{landscape_summary, write_landscape};
use procmap::synthetic::{generate_synthetic, GeneratorModel};
use procmap::{grid_search, Measure, ObjectiveConfig};

fn main() -> procmap::Result<()> {
    let model = GeneratorModel::new()
        .link("start", "receive", 1.0)
        .link("receive", "validate", 4.0)
        .link("receive", "archive", 1.0)
        .link("validate", "fix", 1.0)
        .link("fix", "validate", 1.0)
        .link("validate", "ship", 3.0)
        .link("ship", "invoice", 1.0)
        .link("invoice", "end", 1.0)
        .link("archive", "end", 1.0);
    let log = generate_synthetic(&model, 5, 400)?;

    for measure in Measure::ALL {
        let config = ObjectiveConfig {
            measure,
            grid_step: 10,
            ..ObjectiveConfig::default()
        };
        let landscape = grid_search(&log, &config)?;
        let best = landscape.best();
        println!(
            "{measure:>2}: optimum {} F={:.3} C={:.3} Q={:.3}",
            best.params, best.fitness, best.complexity_scaled, best.objective
        );
        if measure == Measure::Density {
            print!("{}", landscape_summary(&landscape));
            write_landscape(&landscape, std::io::stdout().lock())?;
        }
    }
    Ok(())
}
