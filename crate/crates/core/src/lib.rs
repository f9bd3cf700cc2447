//! Process-map discovery from flat event logs.
//!
//! A log is reduced to a directly-follows graph whose activities and
//! transitions are kept by case-frequency thresholds, then scored by replay
//! fitness and a graph complexity measure. Repeated cycles can be folded into
//! meta-state nodes, and a grid search over the two rates picks the map with
//! the best fitness/complexity trade-off.
//!
//! ```
//! use procmap::{discover, EventLog, RateParams};
//!
//! let log = EventLog::from_sequences(&[vec!["A", "B"], vec!["A", "C"]]).unwrap();
//! let model = discover(&log, RateParams::full()).unwrap();
//! assert_eq!(model.nodes().len(), 3);
//! ```

pub mod cli;
pub mod discovery;
pub mod error;
pub mod eventlog;
pub mod export;
pub mod metastates;
pub mod optimizer;
pub mod quality;
pub mod render;
pub mod stats;
pub mod synthetic;

pub use discovery::{discover, Edge, Miner, Node, ProcessModel, RateParams};
pub use error::{Error, Result};
pub use eventlog::{parse_log, EventLog, LogFormat, Trace};
pub use metastates::{aggregate, cycles_search, AggregatedModel, AggregationMode, Aggregator};
pub use optimizer::{grid_search, optimize_and_aggregate, Landscape, ObjectiveConfig};
pub use quality::{complexity, fitness, Measure};
pub use stats::{compute_significance, SignificanceTable};
