//! Graph primitives and the ground-truth causal oracle.
//!
//! Everything here is computed directly from a [`GraphSequence`] and never
//! looks at protocol state, so the checkers in [`crate::harness`] can use it
//! as an independent reference for the approximation and consensus layers.

mod causal;
mod graph;
mod stability;

pub use causal::{
    causal_distance, component_round_diameter, distances_from, interval_diameter,
    network_round_diameter, CausalDistance,
};
pub use graph::{
    is_exact_scc, root_components, scc_decompose, GraphSequence, ProcessId, RootReport, Round,
    RoundGraph, Scc,
};
pub use stability::{
    check_d_bounded, check_root_d_bounded, find_r_st, find_short_window,
    network_causal_diameter, scc_causal_diameter, stable_intervals_from, vertex_stable_intervals,
    Interval, RoundProfile, RstReport, StableIntervalReport, StableIntervals,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("a network needs at least one process")]
    EmptyProcessSet,
    #[error("a graph sequence needs at least one round")]
    EmptySequence,
    #[error("edge {from}->{to} has an endpoint outside [0, {n})")]
    EndpointOutOfRange {
        from: ProcessId,
        to: ProcessId,
        n: usize,
    },
    #[error("self-loop at process {0}")]
    SelfLoop(ProcessId),
    #[error("duplicate edge {from}->{to}")]
    DuplicateEdge { from: ProcessId, to: ProcessId },
    #[error("round {round} has {found} processes, expected {expected}")]
    ProcessCountMismatch {
        round: Round,
        expected: usize,
        found: usize,
    },
    #[error("round {round} is outside [1, {horizon}]")]
    OutOfRange { round: Round, horizon: Round },
    #[error("interval {interval} is not inside [1, {horizon}]")]
    BadInterval { interval: Interval, horizon: Round },
    #[error("process {process} is outside [0, {n})")]
    UnknownProcess { process: ProcessId, n: usize },
    #[error("component is not vertex-stable: round {round} breaks it")]
    NotVertexStable { round: Round },
    #[error("round {round} has more than one root component")]
    MultipleRoots { round: Round },
    #[error("diameter bound D must be at least 1")]
    ZeroBound,
}
