use thiserror::Error;

use crate::truss::Violations;

/// Errors raised while building or analysing a truss.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrussError {
    #[error("member {member} has coincident end nodes (zero length)")]
    DegenerateGeometry { member: u32 },
    #[error("unknown member id {0}")]
    UnknownMember(u32),
    #[error("unknown node id {0}")]
    UnknownNode(u32),
    #[error("invalid problem definition: {0}")]
    InvalidProblem(String),
    #[error("design does not match problem: {0}")]
    DesignMismatch(String),
    #[error("design is not feasible: {0}")]
    NotFeasible(String),
    #[error("repair stopped after {iterations} iterations with violations remaining")]
    RepairFailed {
        iterations: usize,
        residual: Box<Violations>,
    },
}

/// Errors raised by the search harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SearchError {
    #[error("no feasible design among {count} scatter samples (seed {seed})")]
    ScatterFailed { count: usize, seed: u64 },
    #[error("evaluation budget of {0} exhausted")]
    BudgetExhausted(u64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// Errors raised while reading or writing problem and result files.
#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {message}")]
    Parse { path: String, message: String },
    #[error(transparent)]
    Truss(#[from] TrussError),
}
