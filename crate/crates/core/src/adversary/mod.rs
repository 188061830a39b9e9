//! Graph-sequence generators and the scenario file format.
//!
//! Every generator checks its output against the oracle before returning it,
//! so a scenario's tag is never contradicted by [`Scenario::classify`].

mod expander;
mod generators;
mod scenario;

pub use expander::{expander, random_regular, sampled_expansion, ExpanderConfig};
pub use generators::{
    churn, complete_then_rings, random_single_root, reversing_line, short_window, stable_window,
    static_line, static_star, two_roots, StableWindowConfig,
};
pub use scenario::{AssumptionTag, Classification, Scenario, ScenarioMeta};

use std::fmt::Display;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AdversaryError {
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl AdversaryError {
    pub(crate) fn parse(location: &str, message: impl Display) -> Self {
        AdversaryError::Parse {
            location: location.to_string(),
            message: message.to_string(),
        }
    }

    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        AdversaryError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub(crate) fn infeasible(message: impl Display) -> Self {
        AdversaryError::Infeasible(message.to_string())
    }
}
