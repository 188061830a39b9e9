//! Seeded sweeps, run in parallel and merged in seed order.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::checkers::{
    check_agreement, check_approx_invariants, check_lock_discipline, check_termination_bound,
    check_validity, CheckerVerdict, Outcome,
};
use super::engine::{run, RunOptions};
use super::HarnessError;
use crate::adversary::{
    churn, expander, random_single_root, stable_window, ExpanderConfig, Scenario,
    StableWindowConfig,
};
use crate::graph_core::{find_r_st, Round};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    StableWindow,
    Churn,
    RandomSingleRoot,
    Expander,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::StableWindow,
        Family::Churn,
        Family::RandomSingleRoot,
        Family::Expander,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::StableWindow => "stable_window",
            Family::Churn => "churn",
            Family::RandomSingleRoot => "random_single_root",
            Family::Expander => "expander",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown batch family `{s}`"))
    }
}

/// A sweep. Unset sizes are drawn per seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BatchSpec {
    pub family: Family,
    pub n: Option<usize>,
    pub d: Option<u32>,
    pub horizon: Option<Round>,
    pub prune: bool,
    /// Keep approximation states and run the invariant checker too.
    pub approx: bool,
}

impl BatchSpec {
    pub fn new(family: Family) -> Self {
        BatchSpec {
            family,
            n: None,
            d: None,
            horizon: None,
            prune: false,
            approx: false,
        }
    }

    fn params(&self, seed: u64, n_range: (usize, usize)) -> (ChaCha8Rng, usize, u32) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_ba7c);
        let n = self.n.unwrap_or_else(|| rng.gen_range(n_range.0..=n_range.1));
        let lo = if n >= 3 { 2 } else { 1 };
        let d = self.d.unwrap_or_else(|| rng.gen_range(lo..=(n as u32 - 1).max(lo)));
        (rng, n, d)
    }

    /// The scenario this sweep uses for `seed`.
    pub fn scenario(&self, seed: u64) -> Result<Scenario, HarnessError> {
        let s = match self.family {
            Family::StableWindow => {
                let (mut rng, n, d) = self.params(seed, (3, 16));
                let r_st = rng.gen_range(1..=2 * d + 1);
                let window_len = 4 * d + 2 + rng.gen_range(0..=d);
                let horizon = self
                    .horizon
                    .unwrap_or(r_st + window_len - 1 + rng.gen_range(0..=d));
                stable_window(StableWindowConfig {
                    seed,
                    n,
                    d,
                    r_st,
                    window_len,
                    horizon,
                    churn: true,
                })?
            }
            Family::Churn => {
                let (mut rng, n, d) = self.params(seed, (3, 12));
                let horizon = self.horizon.unwrap_or_else(|| rng.gen_range(20..=80));
                churn(seed, n, d, horizon)?
            }
            Family::RandomSingleRoot => {
                let (mut rng, n, d) = self.params(seed, (2, 6));
                let horizon = self.horizon.unwrap_or_else(|| rng.gen_range(10..=40));
                random_single_root(seed, n, d, horizon)?
            }
            Family::Expander => {
                let n = self.n.unwrap_or(64);
                let cfg = ExpanderConfig {
                    n,
                    root_size: (n / 8).max(1),
                    degree: 4,
                    alpha_target: 0.0,
                    reshuffle: true,
                };
                expander(cfg, seed, self.horizon.unwrap_or(40))?
            }
        };
        Ok(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchRow {
    pub seed: u64,
    pub generator: String,
    pub n: usize,
    #[serde(rename = "D")]
    pub d: u32,
    pub horizon: Round,
    pub r_st: Option<Round>,
    pub first_decision: Option<Round>,
    pub last_decision: Option<Round>,
    pub bound: Option<Round>,
    pub decided: usize,
    pub agreement: Outcome,
    pub validity: Outcome,
    pub termination: Outcome,
    pub approx: Outcome,
    pub lock_discipline: Outcome,
}

impl BatchRow {
    pub fn outcomes(&self) -> [(&'static str, Outcome); 5] {
        [
            ("agreement", self.agreement),
            ("validity", self.validity),
            ("termination", self.termination),
            ("approx", self.approx),
            ("lock_discipline", self.lock_discipline),
        ]
    }

    pub fn any_failed(&self) -> bool {
        self.outcomes().iter().any(|(_, o)| *o == Outcome::Fail)
    }
}

/// One sweep entry: the row plus the failing verdicts, if any.
#[derive(Clone, Debug)]
pub struct BatchEntry {
    pub row: BatchRow,
    pub failures: Vec<CheckerVerdict>,
}

fn run_one(spec: &BatchSpec, seed: u64) -> Result<BatchEntry, HarnessError> {
    let scenario = spec.scenario(seed)?;
    let report = find_r_st(&scenario.rounds, scenario.d).expect("D >= 1");
    let mut row = BatchRow {
        seed,
        generator: scenario.meta.generator.clone(),
        n: scenario.n(),
        d: scenario.d,
        horizon: scenario.horizon(),
        r_st: report.r_st,
        first_decision: None,
        last_decision: None,
        bound: report.termination_bound(),
        decided: 0,
        agreement: Outcome::Skipped,
        validity: Outcome::Skipped,
        termination: Outcome::Skipped,
        approx: Outcome::Skipped,
        lock_discipline: Outcome::Skipped,
    };
    if spec.family == Family::Expander {
        return Ok(BatchEntry {
            row,
            failures: Vec::new(),
        });
    }
    let options = RunOptions {
        prune: spec.prune,
        keep_states: spec.approx,
        ..RunOptions::default()
    };
    let trace = run(&scenario, &options)?;
    let verdicts = [
        check_agreement(&trace),
        check_validity(&trace, &scenario),
        check_termination_bound(&trace, &scenario),
        check_approx_invariants(&trace, &scenario),
        check_lock_discipline(&trace, &scenario),
    ];
    row.first_decision = trace.first_decision();
    row.last_decision = trace.last_decision();
    row.decided = trace.decisions().len();
    row.agreement = verdicts[0].outcome;
    row.validity = verdicts[1].outcome;
    row.termination = verdicts[2].outcome;
    row.approx = verdicts[3].outcome;
    row.lock_discipline = verdicts[4].outcome;
    let failures = verdicts.into_iter().filter(|v| v.failed()).collect();
    Ok(BatchEntry { row, failures })
}

/// Runs every seed independently; the result is in the order of `seeds`.
pub fn batch(spec: &BatchSpec, seeds: &[u64]) -> Result<Vec<BatchEntry>, HarnessError> {
    seeds.par_iter().map(|&seed| run_one(spec, seed)).collect()
}

pub fn write_csv<W: Write>(rows: &[BatchRow], out: W) -> Result<(), HarnessError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| HarnessError::Io(e.to_string()))?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<BatchRow>, HarnessError> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|row| row.map_err(HarnessError::from)).collect()
}

const CSV_HEADER: [&str; 15] = [
    "seed",
    "generator",
    "n",
    "D",
    "horizon",
    "r_st",
    "first_decision",
    "last_decision",
    "bound",
    "decided",
    "agreement",
    "validity",
    "termination",
    "approx",
    "lock_discipline",
];

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeCounts {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
    pub inconclusive: usize,
}

impl OutcomeCounts {
    fn add(&mut self, o: Outcome) {
        match o {
            Outcome::Pass => self.pass += 1,
            Outcome::Fail => self.fail += 1,
            Outcome::Skipped => self.skipped += 1,
            Outcome::Inconclusive => self.inconclusive += 1,
        }
    }
}

/// Aggregate view of a sweep.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub rows: usize,
    pub verdicts: BTreeMap<String, OutcomeCounts>,
    /// `last_decision - r_ST` over rows with both, as a histogram.
    pub decision_latency: BTreeMap<u32, usize>,
    /// `bound - last_decision` over rows with both: the unused slack.
    pub slack: BTreeMap<u32, usize>,
    /// `D` per process count, for sweeps whose `D` is measured.
    pub diameters: BTreeMap<usize, Vec<u32>>,
}

pub fn summarize(rows: &[BatchRow]) -> Summary {
    let mut s = Summary {
        rows: rows.len(),
        ..Summary::default()
    };
    for row in rows {
        for (name, o) in row.outcomes() {
            s.verdicts.entry(name.to_string()).or_default().add(o);
        }
        if let (Some(r), Some(last)) = (row.r_st, row.last_decision) {
            *s.decision_latency.entry(last.saturating_sub(r)).or_default() += 1;
        }
        if let (Some(b), Some(last)) = (row.bound, row.last_decision) {
            *s.slack.entry(b.saturating_sub(last)).or_default() += 1;
        }
        if row.generator == "expander" {
            s.diameters.entry(row.n).or_default().push(row.d);
        }
    }
    s
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rows={}", self.rows)?;
        for (name, c) in &self.verdicts {
            writeln!(
                f,
                "{name}: pass={} fail={} skipped={} inconclusive={}",
                c.pass, c.fail, c.skipped, c.inconclusive
            )?;
        }
        let hist = |m: &BTreeMap<u32, usize>| {
            m.iter().map(|(k, v)| format!("{k}:{v}")).collect::<Vec<_>>().join(" ")
        };
        if !self.decision_latency.is_empty() {
            writeln!(f, "last_decision - r_ST: {}", hist(&self.decision_latency))?;
            writeln!(f, "bound - last_decision: {}", hist(&self.slack))?;
        }
        for (n, ds) in &self.diameters {
            let max = ds.iter().max().copied().unwrap_or(0);
            let mean = ds.iter().sum::<u32>() as f64 / ds.len() as f64;
            writeln!(f, "n={n} diameter max={max} mean={mean:.2} samples={}", ds.len())?;
        }
        Ok(())
    }
}
