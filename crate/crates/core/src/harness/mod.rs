//! Lock-step execution of the protocol over a scenario, trace recording,
//! and the checker suite.

mod batch;
mod checkers;
mod engine;
mod trace_io;

pub use batch::{
    batch, read_csv, summarize, write_csv, BatchEntry, BatchRow, BatchSpec, Family,
    OutcomeCounts, Summary,
};
pub use checkers::{
    check_agreement, check_all, check_approx_invariants, check_lock_discipline,
    check_termination_bound, check_validity, CheckerVerdict, Outcome, Witness, AGREEMENT, APPROX,
    LOCK_DISCIPLINE, TERMINATION, VALIDITY,
};
pub use engine::{
    run, PredicateEval, ProcessEvent, ProcessSnapshot, RoundRecord, RunOptions, Trace, TraceHeader,
};
pub use trace_io::{read_trace, trace_to_string, write_trace};

use thiserror::Error;

use crate::adversary::AdversaryError;
use crate::approximation::ApproxError;
use crate::graph_core::Round;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Scenario(#[from] AdversaryError),
    #[error(transparent)]
    Approx(#[from] ApproxError),
    #[error("horizon override {requested} outside [1, {available}]")]
    HorizonOverride { requested: Round, available: Round },
    #[error("trace line {line}: {message}")]
    TraceParse { line: usize, message: String },
    #[error("report: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Io(String),
}
