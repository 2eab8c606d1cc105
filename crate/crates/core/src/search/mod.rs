//! Search infrastructure shared by every algorithm: the quantized design
//! space, budgeted evaluation, scatter starts and run statistics.

mod bowl;
mod grid;
mod objective;
mod record;
mod scatter;

pub use bowl::QuadraticBowl;
pub use grid::{AxisKind, GridPoint, GridSpace};
pub use objective::{
    Assessment, CountingObjective, EvaluationBudget, Evaluator, Objective, TrussObjective,
};
pub use record::{summarize, RunRecord, RunSummary, SearchOutcome, Unrepaired};
pub use scatter::{sample_point, scatter_init, scatter_init_tolerant, DEFAULT_SCATTER_COUNT};
