//! Simulation and verification of consensus in dynamic directed networks.

pub mod adversary;
pub mod approximation;
pub mod consensus;
pub mod graph_core;
pub mod harness;
pub mod cli;
