//! Grid search over activity/transition rates.
//!
//! Each grid cell is scored with `Q = (1 - lambda) * F + lambda * (1 - C)`
//! where `F` is replay fitness and `C` the model's complexity divided by the
//! complexity of the unfiltered `(100, 100)` model.

use rayon::prelude::*;
use serde::Serialize;

use crate::discovery::{ProcessModel, RateParams};
use crate::error::{Error, Result};
use crate::eventlog::EventLog;
use crate::metastates::{AggregatedModel, AggregationMode, Aggregator};
use crate::quality::{scale_complexity, GraphCounts, Measure, Replayer};

pub const DEFAULT_LAMBDA: f64 = 0.6;
pub const DEFAULT_GRID_STEP: u32 = 5;
pub const DEFAULT_META_STATE_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObjectiveConfig {
    /// Weight of the complexity term, in `[0, 1]`.
    pub lambda: f64,
    pub measure: Measure,
    /// Grid spacing in rate points; must divide 100.
    pub grid_step: u32,
    /// Aggregation applied to the optimal model.
    pub mode: AggregationMode,
    /// Minimum case share of a meta-state.
    pub threshold: f64,
    /// Score every cell on its aggregated model instead of the plain one.
    pub aggregate_landscape: bool,
}

impl Default for ObjectiveConfig {
    fn default() -> Self {
        ObjectiveConfig {
            lambda: DEFAULT_LAMBDA,
            measure: Measure::AverageDegree,
            grid_step: DEFAULT_GRID_STEP,
            mode: AggregationMode::None,
            threshold: DEFAULT_META_STATE_THRESHOLD,
            aggregate_landscape: false,
        }
    }
}

impl ObjectiveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::InvalidConfig(format!(
                "lambda {} is outside [0, 1]",
                self.lambda
            )));
        }
        if !(1..=50).contains(&self.grid_step) || 100 % self.grid_step != 0 {
            return Err(Error::InvalidConfig(format!(
                "grid step {} must divide 100 and lie in 1..=50",
                self.grid_step
            )));
        }
        if !(self.threshold > 0.0 && self.threshold <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "meta-state threshold {} is outside (0, 1]",
                self.threshold
            )));
        }
        Ok(())
    }

    /// Grid cells ordered by activity rate, then transition rate.
    pub fn grid(&self) -> Vec<RateParams> {
        rate_grid(self.grid_step)
    }

    pub fn objective(&self, fitness: f64, scaled_complexity: f64) -> f64 {
        (1.0 - self.lambda) * fitness + self.lambda * (1.0 - scaled_complexity)
    }
}

/// `0, step, ..., 100` on both axes.
pub fn rate_grid(step: u32) -> Vec<RateParams> {
    let values: Vec<f64> = (0..=100)
        .step_by(step.max(1) as usize)
        .map(f64::from)
        .collect();
    values
        .iter()
        .flat_map(|&a| {
            values.iter().map(move |&t| RateParams {
                activity_rate: a,
                transition_rate: t,
            })
        })
        .collect()
}

/// Scores of one grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cell {
    pub params: RateParams,
    pub fitness: f64,
    pub complexity_raw: f64,
    pub complexity_scaled: f64,
    pub objective: f64,
    /// Nodes including `start` and `end`.
    pub nodes: usize,
    /// Edges including those of `start` and `end`.
    pub edges: usize,
    pub meta_states: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Landscape {
    pub config: ObjectiveConfig,
    /// Complexity of the unfiltered model.
    pub reference_complexity: f64,
    /// Cells in grid order.
    pub cells: Vec<Cell>,
    /// Index of the best cell.
    pub optimum: usize,
}

impl Landscape {
    pub fn best(&self) -> &Cell {
        &self.cells[self.optimum]
    }
}

/// Orders cells by objective, then lower transition rate, then higher
/// activity rate. Returns the index of the best.
pub fn select_optimum(cells: &[Cell]) -> Option<usize> {
    (0..cells.len()).max_by(|&i, &j| {
        let (a, b) = (&cells[i], &cells[j]);
        a.objective
            .total_cmp(&b.objective)
            .then(
                b.params
                    .transition_rate
                    .total_cmp(&a.params.transition_rate),
            )
            .then(a.params.activity_rate.total_cmp(&b.params.activity_rate))
            // equal rates: keep the earlier cell
            .then(j.cmp(&i))
    })
}

/// Shared state for scoring many cells of one log.
pub struct Evaluator<'a> {
    aggregator: Aggregator<'a>,
    config: ObjectiveConfig,
    reference: f64,
}

impl<'a> Evaluator<'a> {
    pub fn new(log: &'a EventLog, config: ObjectiveConfig) -> Result<Self> {
        config.validate()?;
        let aggregator = Aggregator::new(log)?;
        let full = aggregator.miner().discover(RateParams::full())?;
        let reference = config
            .measure
            .evaluate(&GraphCounts::of_model(&full, log))?;
        Ok(Evaluator {
            aggregator,
            config,
            reference,
        })
    }

    pub fn reference_complexity(&self) -> f64 {
        self.reference
    }

    pub fn aggregator(&self) -> &Aggregator<'a> {
        &self.aggregator
    }

    pub fn evaluate(&self, params: RateParams) -> Result<Cell> {
        let log = self.aggregator.log();
        let model = self.aggregator.miner().discover(params)?;
        let meta_states = self
            .aggregator
            .states_at(&model, self.config.threshold)
            .len();
        let scored = if self.config.aggregate_landscape {
            self.aggregator
                .aggregate_model(model, self.config.mode, self.config.threshold)?
        } else {
            AggregatedModel::plain(model)
        };
        let fitness = if scored.states.is_empty() {
            Replayer::for_model(&scored.model, log.num_unique_activities())?.fitness(log)?
        } else {
            scored.fitness(log)?
        };
        let counts = GraphCounts::of_model(&scored.model, log);
        let raw = self.config.measure.evaluate(&counts)?;
        let scaled = scale_complexity(self.config.measure, raw, self.reference)?.scaled;
        Ok(Cell {
            params,
            fitness,
            complexity_raw: raw,
            complexity_scaled: scaled,
            objective: self.config.objective(fitness, scaled),
            nodes: counts.nodes,
            edges: counts.edges,
            meta_states,
        })
    }
}

/// Scores one rate setting.
pub fn evaluate_point(
    log: &EventLog,
    params: RateParams,
    config: &ObjectiveConfig,
) -> Result<Cell> {
    Evaluator::new(log, *config)?.evaluate(params)
}

/// Scores every grid cell (in parallel) and picks the optimum.
pub fn grid_search(log: &EventLog, config: &ObjectiveConfig) -> Result<Landscape> {
    let evaluator = Evaluator::new(log, *config)?;
    let cells: Vec<Cell> = config
        .grid()
        .par_iter()
        .map(|p| evaluator.evaluate(*p))
        .collect::<Result<_>>()?;
    let optimum = select_optimum(&cells).expect("grid is never empty");
    Ok(Landscape {
        config: *config,
        reference_complexity: evaluator.reference,
        cells,
        optimum,
    })
}

/// Grid search followed by aggregation of the optimal model.
pub fn optimize_and_aggregate(
    log: &EventLog,
    config: &ObjectiveConfig,
) -> Result<(Landscape, AggregatedModel)> {
    let landscape = grid_search(log, config)?;
    let aggregator = Aggregator::new(log)?;
    let model = aggregator.aggregate(landscape.best().params, config.mode, config.threshold)?;
    Ok((landscape, model))
}

/// The plain model at the optimum of a landscape.
pub fn optimal_model(log: &EventLog, landscape: &Landscape) -> Result<ProcessModel> {
    crate::discovery::discover(log, landscape.best().params)
}
