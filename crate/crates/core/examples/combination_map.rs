//! Which meta-states appear where on the rate grid, and how the
//! combinations connect.

use procmap::metastates::{combination_graph, combination_map};
use procmap::optimizer::rate_grid;
use procmap::render::render_combinations;
use procmap::EventLog;

fn main() -> procmap::Result<()> {
    let mut traces = Vec::new();
    traces.extend(std::iter::repeat_n(vec!["A", "C", "F", "C", "E"], 5));
    traces.extend(std::iter::repeat_n(
        vec!["A", "C", "F", "C", "H", "D", "H", "E"],
        4,
    ));
    traces.push(vec!["A", "E"]);
    let log = EventLog::from_sequences(&traces)?;

    let map = combination_map(&log, &rate_grid(10), 0.3)?;
    for combo in &map.combinations {
        println!(
            "{}: {} covers {:.0}% of the grid",
            combo.id,
            combo.label(),
            100.0 * combo.coverage
        );
    }
    let graph = combination_graph(&map);
    for edge in &graph.edges {
        println!(
            "{} -> {} {}",
            graph.combinations[edge.from].id,
            graph.combinations[edge.to].id,
            edge.label()
        );
    }
    print!("{}", render_combinations(&graph));
    Ok(())
}
