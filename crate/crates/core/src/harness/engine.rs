use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::checkers::CheckerVerdict;
use super::HarnessError;
use crate::adversary::Scenario;
use crate::approximation::ApproxState;
use crate::consensus::{
    ConsensusEvent, ConsensusMessage, ConsensusState, Decision, PackedMessage, UnlockRule,
};
use crate::graph_core::{GraphSequence, Interval, ProcessId, Round};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunOptions {
    /// Drop approximation labels older than `4D` rounds after every round.
    pub prune: bool,
    /// Stop after this many rounds instead of the scenario horizon.
    pub horizon_override: Option<Round>,
    /// Record a digest of every approximation state in every round.
    pub digests: bool,
    /// Keep full approximation states in memory for the invariant checker.
    #[serde(skip)]
    pub keep_states: bool,
    /// `(q, c)`: messages of `q` are no longer delivered after round `c`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub crashes: Vec<(ProcessId, Round)>,
}

impl RunOptions {
    /// Digests on, everything else off.
    pub fn recorded() -> Self {
        RunOptions {
            digests: true,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProcessSnapshot {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub approx_digest: Option<String>,
    #[serde(flatten)]
    pub consensus: ConsensusState,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProcessEvent {
    pub process: ProcessId,
    #[serde(flatten)]
    pub event: ConsensusEvent,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredicateEval {
    pub process: ProcessId,
    pub interval: Interval,
    pub value: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: Round,
    /// Receiver to the senders it heard from, with their consensus payloads.
    pub delivered: BTreeMap<ProcessId, Vec<(ProcessId, ConsensusMessage)>>,
    pub states_after: BTreeMap<ProcessId, ProcessSnapshot>,
    pub events: Vec<ProcessEvent>,
    pub predicate_evals: Vec<PredicateEval>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub scenario_digest: String,
    pub generator: String,
    pub seed: u64,
    pub n: usize,
    #[serde(rename = "D")]
    pub d: u32,
    pub horizon: Round,
    pub options: RunOptions,
    pub unlock_rule: UnlockRule,
    pub decisions: BTreeMap<ProcessId, Decision>,
    pub verdicts: Vec<CheckerVerdict>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub header: TraceHeader,
    pub rounds: Vec<RoundRecord>,
    /// `approx_states[r-1][p]`: state of `p` after round `r`, when kept.
    pub approx_states: Option<Vec<Vec<ApproxState>>>,
}

impl Trace {
    pub fn horizon(&self) -> Round {
        self.header.horizon
    }

    pub fn decisions(&self) -> &BTreeMap<ProcessId, Decision> {
        &self.header.decisions
    }

    pub fn record(&self, r: Round) -> &RoundRecord {
        &self.rounds[r as usize - 1]
    }

    pub fn first_decision(&self) -> Option<Round> {
        self.header.decisions.values().map(|d| d.round).min()
    }

    pub fn last_decision(&self) -> Option<Round> {
        self.header.decisions.values().map(|d| d.round).max()
    }

    /// The sequence the run actually used.
    pub fn sequence(&self, scenario: &Scenario) -> GraphSequence {
        scenario
            .rounds
            .prefix(self.horizon())
            .expect("trace horizon is positive")
    }
}

/// Runs approximation and consensus in lock-step over the scenario's rounds.
pub fn run(scenario: &Scenario, options: &RunOptions) -> Result<Trace, HarnessError> {
    scenario.validate()?;
    let horizon = match options.horizon_override {
        Some(h) if h == 0 || h > scenario.horizon() => {
            return Err(HarnessError::HorizonOverride {
                requested: h,
                available: scenario.horizon(),
            })
        }
        Some(h) => h,
        None => scenario.horizon(),
    };
    let n = scenario.n();
    let d = scenario.d;
    let rule = scenario.meta.unlock_rule;
    let crash_after: BTreeMap<ProcessId, Round> = options.crashes.iter().copied().collect();

    let mut approx: Vec<ApproxState> = scenario.rounds.processes().map(ApproxState::new).collect();
    let mut cons: Vec<ConsensusState> = scenario.inputs.iter().map(|&v| ConsensusState::new(v)).collect();
    let mut decisions = BTreeMap::new();
    let mut rounds = Vec::with_capacity(horizon as usize);
    let mut kept = options.keep_states.then(Vec::new);

    for r in 1..=horizon {
        let g = scenario.rounds.graph(r).expect("round within horizon");
        let outbox: Vec<PackedMessage> = (0..n)
            .map(|p| PackedMessage::pack(approx[p].emit(), cons[p].emit()))
            .collect();
        let silent = |p: ProcessId| crash_after.get(&p).is_some_and(|&c| r > c);

        let mut delivered = BTreeMap::new();
        let mut events = Vec::new();
        let mut evals = Vec::new();
        for q in scenario.rounds.processes() {
            let senders: Vec<ProcessId> = g
                .in_neighbors(q)
                .iter()
                .copied()
                .filter(|&p| !silent(p))
                .collect();
            let approx_in: Vec<_> = senders.iter().map(|p| &outbox[p.index()].approx).collect();
            let cons_in: Vec<_> = senders.iter().map(|p| &outbox[p.index()].cons).collect();
            let a = &mut approx[q.index()];
            a.absorb(r, &approx_in)?;
            let a = &*a;
            let produced = cons[q.index()].step(r, &cons_in, d, rule, |iv| {
                let value = a.in_stable_root(iv, r);
                evals.push(PredicateEval {
                    process: q,
                    interval: iv,
                    value,
                });
                value
            });
            for event in produced {
                if let ConsensusEvent::Decide { .. } = event {
                    decisions.insert(q, cons[q.index()].decision.expect("decided"));
                }
                events.push(ProcessEvent { process: q, event });
            }
            delivered.insert(
                q,
                senders.iter().map(|&p| (p, outbox[p.index()].cons)).collect(),
            );
        }
        if options.prune {
            let keep_after = r.saturating_sub(4 * d);
            for a in &mut approx {
                a.prune(keep_after);
            }
        }
        let states_after = scenario
            .rounds
            .processes()
            .map(|p| {
                let snap = ProcessSnapshot {
                    approx_digest: options.digests.then(|| approx[p.index()].digest()),
                    consensus: cons[p.index()].clone(),
                };
                (p, snap)
            })
            .collect();
        if let Some(k) = kept.as_mut() {
            k.push(approx.clone());
        }
        rounds.push(RoundRecord {
            round: r,
            delivered,
            states_after,
            events,
            predicate_evals: evals,
        });
    }

    Ok(Trace {
        header: TraceHeader {
            scenario_digest: scenario.digest(),
            generator: scenario.meta.generator.clone(),
            seed: scenario.meta.seed,
            n,
            d,
            horizon,
            options: options.clone(),
            unlock_rule: rule,
            decisions,
            verdicts: Vec::new(),
        },
        rounds,
        approx_states: kept,
    })
}
