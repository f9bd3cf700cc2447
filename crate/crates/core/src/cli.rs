//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when mining fails, 2 for usage and I/O
//! errors.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::discovery::{discover, RateParams};
use crate::error::{Error, Result};
use crate::eventlog::{parse_log, EventLog, LogFormat, TimestampColumn};
use crate::export::{
    cycle_report, cycle_report_text, landscape_summary, model_to_json, write_combination_map,
    write_cycle_report, write_landscape,
};
use crate::metastates::{
    combination_graph, combination_map, cycles_search, AggregatedModel, AggregationMode,
};
use crate::optimizer::{optimize_and_aggregate, rate_grid, ObjectiveConfig};
use crate::quality::Measure;
use crate::render::{render_combinations, render_model};

#[derive(Debug, Parser)]
#[command(name = "procmap", version, about = "Process maps from flat event logs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Discover a process map at fixed rates.
    Discover(DiscoverArgs),
    /// Grid-search the rates and write the landscape and the optimal map.
    Optimize(OptimizeArgs),
    /// List the cycles of a log and mark meta-states.
    Cycles(CyclesArgs),
    /// Map meta-state combinations over the rate grid.
    Combos(CombosArgs),
}

#[derive(Debug, Clone, Args)]
pub struct LogArgs {
    /// Event log (delimiter-separated text with a header row).
    pub log: PathBuf,
    #[arg(long, default_value = "case_id")]
    pub case_column: String,
    #[arg(long, default_value = "activity")]
    pub activity_column: String,
    /// Timestamp column; used for ordering when present.
    #[arg(long)]
    pub timestamp_column: Option<String>,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
}

impl LogArgs {
    pub fn format(&self) -> Result<LogFormat> {
        if !self.delimiter.is_ascii() {
            return Err(Error::InvalidConfig("delimiter must be ASCII".into()));
        }
        Ok(LogFormat {
            case_column: self.case_column.clone(),
            activity_column: self.activity_column.clone(),
            timestamp: match &self.timestamp_column {
                Some(name) => TimestampColumn::Required(name.clone()),
                None => TimestampColumn::IfPresent("timestamp".into()),
            },
            delimiter: self.delimiter as u8,
        })
    }

    pub fn load(&self) -> Result<EventLog> {
        let file = File::open(&self.log).map_err(|source| Error::File {
            path: self.log.clone(),
            source,
        })?;
        parse_log(BufReader::new(file), &self.format()?)
    }
}

#[derive(Debug, Clone, Args)]
pub struct DiscoverArgs {
    #[command(flatten)]
    pub log: LogArgs,
    /// Activity rate in [0, 100].
    #[arg(long = "ra", default_value_t = 100.0)]
    pub activity_rate: f64,
    /// Transition rate in [0, 100].
    #[arg(long = "rt", default_value_t = 100.0)]
    pub transition_rate: f64,
    /// DOT output; printed to stdout when neither output is given.
    #[arg(long)]
    pub dot: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub log: LogArgs,
    #[arg(long, default_value_t = crate::optimizer::DEFAULT_LAMBDA)]
    pub lambda: f64,
    /// Complexity measure: AD, H, Kn or R.
    #[arg(long, default_value = "AD")]
    pub measure: Measure,
    #[arg(long, default_value_t = crate::optimizer::DEFAULT_GRID_STEP)]
    pub step: u32,
    /// Aggregation of the optimal model: none, outer, inner_all, inner_freq.
    #[arg(long, default_value = "none")]
    pub mode: AggregationMode,
    /// Meta-state case-share threshold.
    #[arg(long, default_value_t = crate::optimizer::DEFAULT_META_STATE_THRESHOLD)]
    pub threshold: f64,
    /// Apply the aggregation mode at every cell of the landscape.
    #[arg(long)]
    pub aggregate_landscape: bool,
    /// Landscape CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub dot: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Summary text; printed to stdout as well.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CyclesArgs {
    #[command(flatten)]
    pub log: LogArgs,
    #[arg(long, default_value_t = crate::optimizer::DEFAULT_META_STATE_THRESHOLD)]
    pub threshold: f64,
    /// Write CSV instead of an aligned table.
    #[arg(long)]
    pub csv: bool,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CombosArgs {
    #[command(flatten)]
    pub log: LogArgs,
    #[arg(long, default_value_t = crate::optimizer::DEFAULT_GRID_STEP)]
    pub step: u32,
    #[arg(long, default_value_t = crate::optimizer::DEFAULT_META_STATE_THRESHOLD)]
    pub threshold: f64,
    /// Cell-to-combination CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Combination graph DOT.
    #[arg(long)]
    pub dot: Option<PathBuf>,
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::File {
        path: path.to_path_buf(),
        source,
    })
}

fn csv_bytes(write: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    Ok(buf)
}

pub fn cmd_discover(args: &DiscoverArgs, stdout: &mut dyn Write) -> Result<()> {
    let params = RateParams::new(args.activity_rate, args.transition_rate)?;
    let log = args.log.load()?;
    let model = AggregatedModel::plain(discover(&log, params)?);
    let dot = render_model(&model);
    if let Some(path) = &args.dot {
        write_file(path, dot.as_bytes())?;
    }
    if let Some(path) = &args.json {
        write_file(path, model_to_json(&model)?.as_bytes())?;
    }
    if args.dot.is_none() && args.json.is_none() {
        stdout.write_all(dot.as_bytes())?;
    }
    Ok(())
}

pub fn cmd_optimize(args: &OptimizeArgs, stdout: &mut dyn Write) -> Result<()> {
    let config = ObjectiveConfig {
        lambda: args.lambda,
        measure: args.measure,
        grid_step: args.step,
        mode: args.mode,
        threshold: args.threshold,
        aggregate_landscape: args.aggregate_landscape,
    };
    config.validate()?;
    let log = args.log.load()?;
    let (landscape, model) = optimize_and_aggregate(&log, &config)?;
    if let Some(path) = &args.csv {
        write_file(path, &csv_bytes(|buf| write_landscape(&landscape, buf))?)?;
    }
    if let Some(path) = &args.dot {
        write_file(path, render_model(&model).as_bytes())?;
    }
    if let Some(path) = &args.json {
        write_file(path, model_to_json(&model)?.as_bytes())?;
    }
    let summary = landscape_summary(&landscape);
    if let Some(path) = &args.summary {
        write_file(path, summary.as_bytes())?;
    }
    stdout.write_all(summary.as_bytes())?;
    Ok(())
}

pub fn cmd_cycles(args: &CyclesArgs, stdout: &mut dyn Write) -> Result<()> {
    if !(args.threshold > 0.0 && args.threshold <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "meta-state threshold {} is outside (0, 1]",
            args.threshold
        )));
    }
    let log = args.log.load()?;
    let rows = cycle_report(&cycles_search(&log), args.threshold);
    let bytes = if args.csv {
        csv_bytes(|buf| write_cycle_report(&rows, buf))?
    } else {
        cycle_report_text(&rows).into_bytes()
    };
    match &args.output {
        Some(path) => write_file(path, &bytes),
        None => Ok(stdout.write_all(&bytes)?),
    }
}

pub fn cmd_combos(args: &CombosArgs, stdout: &mut dyn Write) -> Result<()> {
    let config = ObjectiveConfig {
        grid_step: args.step,
        threshold: args.threshold,
        ..ObjectiveConfig::default()
    };
    config.validate()?;
    let log = args.log.load()?;
    let map = combination_map(&log, &rate_grid(args.step), args.threshold)?;
    let graph = combination_graph(&map);
    let dot = render_combinations(&graph);
    if let Some(path) = &args.csv {
        write_file(path, &csv_bytes(|buf| write_combination_map(&map, buf))?)?;
    }
    if let Some(path) = &args.dot {
        write_file(path, dot.as_bytes())?;
    }
    if args.csv.is_none() && args.dot.is_none() {
        stdout.write_all(dot.as_bytes())?;
    }
    Ok(())
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Discover(args) => cmd_discover(args, stdout),
        Command::Optimize(args) => cmd_optimize(args, stdout),
        Command::Cycles(args) => cmd_cycles(args, stdout),
        Command::Combos(args) => cmd_combos(args, stdout),
    }
}

pub fn exit_code(error: &Error) -> i32 {
    if error.is_usage() {
        2
    } else {
        1
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Errors go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(&cli, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
