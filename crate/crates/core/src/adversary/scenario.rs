use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::AdversaryError;
use crate::consensus::{UnlockRule, Value};
use crate::graph_core::{find_r_st, GraphSequence, ProcessId, Round, RoundGraph, RstReport};

/// What the oracle (or a generator) says about a sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AssumptionTag {
    Assumption1,
    Assumption2,
    Violation(String),
}

impl AssumptionTag {
    pub fn violation(kind: &str) -> Self {
        AssumptionTag::Violation(kind.to_string())
    }

    pub fn is_violation(&self) -> bool {
        matches!(self, AssumptionTag::Violation(_))
    }
}

impl fmt::Display for AssumptionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssumptionTag::Assumption1 => f.write_str("ASSUMPTION_1"),
            AssumptionTag::Assumption2 => f.write_str("ASSUMPTION_2"),
            AssumptionTag::Violation(kind) => write!(f, "VIOLATION({kind})"),
        }
    }
}

impl FromStr for AssumptionTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ASSUMPTION_1" => Ok(AssumptionTag::Assumption1),
            "ASSUMPTION_2" => Ok(AssumptionTag::Assumption2),
            _ => s
                .strip_prefix("VIOLATION(")
                .and_then(|rest| rest.strip_suffix(')'))
                .filter(|kind| !kind.is_empty())
                .map(AssumptionTag::violation)
                .ok_or_else(|| format!("unknown assumption tag `{s}`")),
        }
    }
}

impl Serialize for AssumptionTag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for AssumptionTag {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioMeta {
    pub generator: String,
    pub seed: u64,
    pub assumption: AssumptionTag,
    pub claimed_r_st: Option<Round>,
    #[serde(default, skip_serializing_if = "UnlockRule::is_default")]
    pub unlock_rule: UnlockRule,
}

/// Inputs plus graph sequence: everything that determines a run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    pub d: u32,
    pub inputs: Vec<Value>,
    pub rounds: GraphSequence,
    pub meta: ScenarioMeta,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    n: usize,
    #[serde(rename = "D")]
    d: u32,
    horizon: Round,
    inputs: Vec<i64>,
    rounds: Vec<Vec<(u32, u32)>>,
    meta: ScenarioMeta,
}

/// The oracle's verdict on a scenario.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub tag: AssumptionTag,
    pub report: RstReport,
}

impl Scenario {
    pub fn new(
        d: u32,
        inputs: Vec<Value>,
        rounds: GraphSequence,
        meta: ScenarioMeta,
    ) -> Result<Self, AdversaryError> {
        let s = Scenario {
            d,
            inputs,
            rounds,
            meta,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.rounds.n()
    }

    pub fn horizon(&self) -> Round {
        self.rounds.horizon()
    }

    pub fn input(&self, p: ProcessId) -> Value {
        self.inputs[p.index()]
    }

    pub fn validate(&self) -> Result<(), AdversaryError> {
        if self.d == 0 {
            return Err(AdversaryError::parse("D", "must be at least 1"));
        }
        if self.inputs.len() != self.n() {
            return Err(AdversaryError::parse(
                "inputs",
                format!("has {} entries, expected n = {}", self.inputs.len(), self.n()),
            ));
        }
        Ok(())
    }

    /// Re-derives the assumption status from the graphs alone.
    pub fn classify(&self) -> Classification {
        let report = find_r_st(&self.rounds, self.d).expect("D >= 1");
        let tag = if !report.multi_root_rounds.is_empty() {
            AssumptionTag::violation("multiple_roots")
        } else if !report.unbounded_intervals.is_empty() {
            AssumptionTag::violation("unbounded_stable_root")
        } else if report.r_st.is_none() {
            AssumptionTag::violation("no_stable_window")
        } else {
            AssumptionTag::Assumption1
        };
        Classification { tag, report }
    }

    /// Canonical file contents: one field per line, one round per line,
    /// edges sorted.
    pub fn to_json(&self) -> String {
        let mut out = String::from("{\n");
        out.push_str(&format!("  \"n\": {},\n", self.n()));
        out.push_str(&format!("  \"D\": {},\n", self.d));
        out.push_str(&format!("  \"horizon\": {},\n", self.horizon()));
        let inputs: Vec<i64> = self.inputs.iter().map(|v| v.0).collect();
        out.push_str(&format!("  \"inputs\": {},\n", json(&inputs)));
        out.push_str("  \"rounds\": [\n");
        let t = self.rounds.rounds().len();
        for (i, g) in self.rounds.rounds().iter().enumerate() {
            let edges: Vec<(u32, u32)> = g.edges().map(|(a, b)| (a.0, b.0)).collect();
            out.push_str("    ");
            out.push_str(&json(&edges));
            out.push_str(if i + 1 < t { ",\n" } else { "\n" });
        }
        out.push_str("  ],\n");
        out.push_str(&format!("  \"meta\": {}\n", json(&self.meta)));
        out.push_str("}\n");
        out
    }

    pub fn from_json(text: &str) -> Result<Self, AdversaryError> {
        let file: ScenarioFile = serde_json::from_str(text).map_err(|e| AdversaryError::Parse {
            location: format!("line {}, column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        if file.rounds.len() != file.horizon as usize {
            return Err(AdversaryError::parse(
                "horizon",
                format!("is {} but {} rounds are listed", file.horizon, file.rounds.len()),
            ));
        }
        let mut graphs = Vec::with_capacity(file.rounds.len());
        for (i, edges) in file.rounds.iter().enumerate() {
            let g = RoundGraph::new(
                file.n,
                edges.iter().map(|&(a, b)| (ProcessId(a), ProcessId(b))),
            )
            .map_err(|e| AdversaryError::parse(&format!("rounds[{i}] (round {})", i + 1), e))?;
            graphs.push(g);
        }
        let rounds =
            GraphSequence::new(file.n, graphs).map_err(|e| AdversaryError::parse("rounds", e))?;
        Scenario::new(
            file.d,
            file.inputs.into_iter().map(Value).collect(),
            rounds,
            file.meta,
        )
    }

    pub fn save(&self, path: &Path) -> Result<(), AdversaryError> {
        std::fs::write(path, self.to_json()).map_err(|e| AdversaryError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self, AdversaryError> {
        let text = std::fs::read_to_string(path).map_err(|e| AdversaryError::io(path, e))?;
        Self::from_json(&text)
    }

    /// sha256 of the canonical file contents.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("plain data serializes")
}
