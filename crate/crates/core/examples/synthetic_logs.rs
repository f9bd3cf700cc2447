//! Seeded logs from a weighted generator model, written as CSV and read back.

use procmap::synthetic::{generate_synthetic, GeneratorModel};
use procmap::{parse_log, LogFormat};

fn main() -> procmap::Result<()> {
    // B -> C -> B loop, repeated twice per case on average
    let model = GeneratorModel::new()
        .link("start", "A", 1.0)
        .link("A", "B", 1.0)
        .link("B", "C", 2.0)
        .link("B", "end", 1.0)
        .link("C", "B", 1.0);
    let log = generate_synthetic(&model, 2024, 6)?;
    for trace in log.traces() {
        println!("{}: {}", trace.case_id, trace.events.join(" "));
    }

    let mut csv = Vec::new();
    log.write_csv(&mut csv)?;
    let back = parse_log(csv.as_slice(), &LogFormat::default())?;
    assert_eq!(back, log);
    println!("{} bytes of CSV, round trip ok", csv.len());
    Ok(())
}
