//! Trace checkers. Every verdict is computed from the trace and the oracle
//! in [`crate::graph_core`]; none of them trusts the protocol's own view.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::engine::Trace;
use crate::adversary::Scenario;
use crate::approximation::ApproxState;
use crate::consensus::{ConsensusEvent, DecideVia, Value};
use crate::graph_core::{find_r_st, Interval, ProcessId, Round, RoundProfile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    Skipped,
    Inconclusive,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::Skipped => "skipped",
            Outcome::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub round: Round,
    pub processes: Vec<ProcessId>,
    pub values: Vec<Value>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckerVerdict {
    pub name: String,
    pub outcome: Outcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckerVerdict {
    fn pass(name: &str) -> Self {
        CheckerVerdict {
            name: name.to_string(),
            outcome: Outcome::Pass,
            witness: None,
            note: None,
        }
    }

    fn fail(name: &str, witness: Witness) -> Self {
        CheckerVerdict {
            name: name.to_string(),
            outcome: Outcome::Fail,
            witness: Some(witness),
            note: None,
        }
    }

    fn other(name: &str, outcome: Outcome, note: impl Into<String>) -> Self {
        CheckerVerdict {
            name: name.to_string(),
            outcome,
            witness: None,
            note: Some(note.into()),
        }
    }

    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }

    pub fn failed(&self) -> bool {
        self.outcome == Outcome::Fail
    }
}

impl fmt::Display for CheckerVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.name, self.outcome)?;
        if let Some(w) = &self.witness {
            let ps: Vec<String> = w.processes.iter().map(|p| p.to_string()).collect();
            let vs: Vec<String> = w.values.iter().map(|v| v.to_string()).collect();
            write!(
                f,
                " (round {}, processes [{}], values [{}]: {})",
                w.round,
                ps.join(","),
                vs.join(","),
                w.detail
            )?;
        }
        if let Some(note) = &self.note {
            write!(f, " ({note})")?;
        }
        Ok(())
    }
}

pub const AGREEMENT: &str = "AGREEMENT";
pub const VALIDITY: &str = "VALIDITY";
pub const TERMINATION: &str = "TERMINATION";
pub const APPROX: &str = "APPROX";
pub const LOCK_DISCIPLINE: &str = "LOCK_DISCIPLINE";

pub fn check_agreement(trace: &Trace) -> CheckerVerdict {
    let mut decisions = trace.decisions().iter();
    let Some((&p, first)) = decisions.next() else {
        return CheckerVerdict::pass(AGREEMENT);
    };
    match decisions.find(|(_, d)| d.value != first.value) {
        None => CheckerVerdict::pass(AGREEMENT),
        Some((&q, other)) => {
            let mut values = vec![first.value, other.value];
            values.sort();
            CheckerVerdict::fail(
                AGREEMENT,
                Witness {
                    round: first.round.max(other.round),
                    processes: vec![p, q],
                    values,
                    detail: format!(
                        "{p} decided {} in round {}, {q} decided {} in round {}",
                        first.value, first.round, other.value, other.round
                    ),
                },
            )
        }
    }
}

pub fn check_validity(trace: &Trace, scenario: &Scenario) -> CheckerVerdict {
    let inputs: BTreeSet<Value> = scenario.inputs.iter().copied().collect();
    match trace.decisions().iter().find(|(_, d)| !inputs.contains(&d.value)) {
        None => CheckerVerdict::pass(VALIDITY),
        Some((&p, d)) => CheckerVerdict::fail(
            VALIDITY,
            Witness {
                round: d.round,
                processes: vec![p],
                values: vec![d.value],
                detail: "decided value is nobody's input".into(),
            },
        ),
    }
}

/// Every process decides by `r_ST + 4D + 1`.
pub fn check_termination_bound(trace: &Trace, scenario: &Scenario) -> CheckerVerdict {
    let report = find_r_st(&scenario.rounds, scenario.d).expect("D >= 1");
    if !report.assumption_holds() {
        return CheckerVerdict::other(TERMINATION, Outcome::Skipped, "stability assumption does not hold");
    }
    let bound = report.termination_bound().expect("r_ST exists");
    if trace.horizon() < bound {
        return CheckerVerdict::other(
            TERMINATION,
            Outcome::Inconclusive,
            format!("horizon {} ends before the bound {bound}", trace.horizon()),
        );
    }
    for p in scenario.rounds.processes() {
        match trace.decisions().get(&p) {
            Some(d) if d.round <= bound => {}
            Some(d) => {
                return CheckerVerdict::fail(
                    TERMINATION,
                    Witness {
                        round: d.round,
                        processes: vec![p],
                        values: vec![d.value],
                        detail: format!("decided after the bound {bound}"),
                    },
                )
            }
            None => {
                return CheckerVerdict::fail(
                    TERMINATION,
                    Witness {
                        round: bound,
                        processes: vec![p],
                        values: vec![],
                        detail: format!("undecided at the bound {bound}"),
                    },
                )
            }
        }
    }
    CheckerVerdict::pass(TERMINATION)
}

fn approx_fail(round: Round, p: ProcessId, detail: String) -> CheckerVerdict {
    CheckerVerdict::fail(
        APPROX,
        Witness {
            round,
            processes: vec![p],
            values: vec![],
            detail,
        },
    )
}

/// The under-approximation and root-detection properties of the network
/// approximation, checked in every round against the real graphs.
pub fn check_approx_invariants(trace: &Trace, scenario: &Scenario) -> CheckerVerdict {
    let Some(states) = &trace.approx_states else {
        return CheckerVerdict::other(APPROX, Outcome::Skipped, "run did not keep approximation states");
    };
    if trace.header.options.prune {
        return CheckerVerdict::other(APPROX, Outcome::Skipped, "pruned runs forget old labels");
    }
    let seq = trace.sequence(scenario);
    let profile = RoundProfile::compute(&seq);
    let d = scenario.d;

    for (i, round_states) in states.iter().enumerate() {
        let t = i as Round + 1;
        for a in round_states {
            let p = a.owner();
            if let Some(v) = subset_violation(a, &seq, t) {
                return approx_fail(t, p, v);
            }
            for s in 1..t {
                let found = a.detected_component(s);
                if found.is_empty() {
                    continue;
                }
                let root = profile.single_root(s);
                let holds = match &root {
                    Some(r) => *r == found,
                    None => profile.roots(s).roots.iter().any(|c| c.to_set() == found),
                };
                if !holds {
                    return approx_fail(
                        t,
                        p,
                        format!("detected {found:?} for round {s}, which is not its root component"),
                    );
                }
            }
        }
    }

    for (m, root) in profile.maximal_root_intervals() {
        for r in m.rounds() {
            let Some(last_good) = (r + d..=m.end)
                .rev()
                .find(|&s| profile.root_d_bounded(Interval::new(r, s), d).unwrap_or(false))
            else {
                continue;
            };
            for t in r + d..=m.end {
                for &p in &root {
                    let got = states[t as usize - 1][p.index()].detected_component(r);
                    if got != root {
                        return approx_fail(
                            t,
                            p,
                            format!("round {r} of stable root {root:?} detected as {got:?}"),
                        );
                    }
                }
            }
            for s in r + d..=last_good {
                if !profile.root_d_bounded(Interval::new(r, s), d).unwrap_or(false) {
                    continue;
                }
                for &p in &root {
                    let a = &states[s as usize - 1][p.index()];
                    if !a.in_stable_root(Interval::new(r, s - d), s + 1) {
                        return approx_fail(
                            s,
                            p,
                            format!("inStableRoot([{r},{}]) false at the end of round {s}", s - d),
                        );
                    }
                }
            }
        }
    }
    CheckerVerdict::pass(APPROX)
}

fn subset_violation(a: &ApproxState, seq: &crate::graph_core::GraphSequence, t: Round) -> Option<String> {
    let mut heads: BTreeMap<Round, BTreeSet<ProcessId>> = BTreeMap::new();
    // the owner always knows who it heard from
    for s in 1..=t {
        heads.entry(s).or_default().insert(a.owner());
    }
    for (from, to, labels) in a.edges() {
        for s in labels.iter() {
            if s > t {
                return Some(format!("label {s} on {from}->{to} is from the future"));
            }
            let g = seq.graph(s).expect("label within horizon");
            if !g.has_edge(from, to) {
                return Some(format!("{from}->{to} labeled {s} is not an edge of round {s}"));
            }
            heads.entry(s).or_default().insert(to);
        }
    }
    for (s, ws) in heads {
        let g = seq.graph(s).expect("label within horizon");
        for w in ws {
            for &v in g.in_neighbors(w) {
                if !a.labels(v, w).is_some_and(|l| l.contains(s)) {
                    return Some(format!("knows an in-edge of {w} in round {s} but misses {v}->{w}"));
                }
            }
        }
    }
    None
}

/// Properties of the first decision: the lock window, the stable root
/// around the lock round, who locked, and the common estimate.
pub fn check_lock_discipline(trace: &Trace, scenario: &Scenario) -> CheckerVerdict {
    let Some(r) = trace.first_decision() else {
        return CheckerVerdict::other(LOCK_DISCIPLINE, Outcome::Skipped, "nobody decided");
    };
    let seq = trace.sequence(scenario);
    let report = find_r_st(&seq, scenario.d).expect("D >= 1");
    if !report.safety_clauses_hold() {
        return CheckerVerdict::other(
            LOCK_DISCIPLINE,
            Outcome::Skipped,
            "needs single roots and D-bounded stable roots",
        );
    }
    let d = scenario.d;
    let rec = trace.record(r);
    let Some(p) = rec.events.iter().find_map(|e| match e.event {
        ConsensusEvent::Decide { via: DecideVia::Own, .. } => Some(e.process),
        _ => None,
    }) else {
        return fail_lock(r, vec![], vec![], "first decision was not on an own lock".into());
    };
    let state = &rec.states_after[&p].consensus;
    let l = state.lock_round;
    if l == 0 || l + d > r || r > l + 2 * d {
        return fail_lock(r, vec![p], vec![state.x], format!("lock round {l} outside [r-2D, r-D]"));
    }
    let profile = RoundProfile::compute(&seq);
    let window = Interval::new(l - d - 1, l + d);
    let root = profile.single_root(window.start);
    let stable = root.as_ref().is_some_and(|set| {
        set.contains(&p) && window.rounds().all(|s| profile.single_root(s).as_ref() == Some(set))
    });
    if !stable {
        return fail_lock(r, vec![p], vec![state.x], format!("no vertex-stable root containing {p} over {window}"));
    }
    let root = root.expect("checked");
    let lockers_at = |s: Round| -> BTreeSet<ProcessId> {
        trace
            .record(s)
            .events
            .iter()
            .filter(|e| matches!(e.event, ConsensusEvent::Lock { .. }))
            .map(|e| e.process)
            .collect()
    };
    let at_l = lockers_at(l);
    if let Some(&q) = root.iter().find(|q| !at_l.contains(q)) {
        return fail_lock(l, vec![q], vec![], format!("root member {q} did not lock in round {l}"));
    }
    for s in l..=r {
        if let Some(&q) = lockers_at(s).iter().find(|q| !root.contains(q)) {
            return fail_lock(s, vec![q], vec![], format!("non-member {q} locked in round {s}"));
        }
    }
    let xs: BTreeMap<ProcessId, Value> = rec
        .states_after
        .iter()
        .map(|(&q, snap)| (q, snap.consensus.x))
        .collect();
    if let Some((&q, &v)) = xs.iter().find(|(_, &v)| v != state.x) {
        return fail_lock(r, vec![p, q], vec![state.x, v], "estimates differ at the first decision".into());
    }
    CheckerVerdict::pass(LOCK_DISCIPLINE)
}

fn fail_lock(round: Round, processes: Vec<ProcessId>, values: Vec<Value>, detail: String) -> CheckerVerdict {
    CheckerVerdict::fail(
        LOCK_DISCIPLINE,
        Witness {
            round,
            processes,
            values,
            detail,
        },
    )
}

/// All checkers in a fixed order.
pub fn check_all(trace: &Trace, scenario: &Scenario) -> Vec<CheckerVerdict> {
    vec![
        check_agreement(trace),
        check_validity(trace, scenario),
        check_termination_bound(trace, scenario),
        check_approx_invariants(trace, scenario),
        check_lock_discipline(trace, scenario),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::{
        short_window, stable_window, static_line, two_roots, StableWindowConfig,
    };
    use crate::harness::engine::{run, ProcessEvent, RunOptions};

    fn kept() -> RunOptions {
        RunOptions {
            keep_states: true,
            ..RunOptions::default()
        }
    }

    fn window(seed: u64) -> Scenario {
        stable_window(StableWindowConfig::minimal(seed, 6, 3, 4)).unwrap()
    }

    #[test]
    fn stable_window_passes_everything() {
        for seed in 0..5 {
            let s = window(seed);
            let t = run(&s, &kept()).unwrap();
            for v in check_all(&t, &s) {
                assert!(v.passed(), "seed {seed}: {v}");
            }
        }
    }

    #[test]
    fn empty_decisions_pass_vacuously() {
        let s = static_line(3, 2).unwrap();
        let t = run(&s, &RunOptions::default()).unwrap();
        assert!(t.decisions().is_empty());
        assert!(check_agreement(&t).passed());
        assert!(check_validity(&t, &s).passed());
        assert_eq!(check_lock_discipline(&t, &s).outcome, Outcome::Skipped);
    }

    #[test]
    fn two_roots_agreement_witness() {
        let s = two_roots(2, 2, 60).unwrap();
        let t = run(&s, &RunOptions::default()).unwrap();
        let v = check_agreement(&t);
        assert!(v.failed());
        assert_eq!(v.witness.unwrap().values, vec![Value(0), Value(1)]);
        assert!(check_validity(&t, &s).passed());
        assert_eq!(check_termination_bound(&t, &s).outcome, Outcome::Skipped);
    }

    #[test]
    fn validity_catches_foreign_values() {
        let s = window(1);
        let mut t = run(&s, &RunOptions::default()).unwrap();
        let p = *t.header.decisions.keys().next().unwrap();
        t.header.decisions.get_mut(&p).unwrap().value = Value(1000);
        let v = check_validity(&t, &s);
        assert!(v.failed());
        assert_eq!(v.witness.unwrap().processes, vec![p]);
    }

    #[test]
    fn short_horizon_is_inconclusive() {
        let s = window(2);
        let opts = RunOptions {
            horizon_override: Some(s.horizon() - s.d - 2),
            ..RunOptions::default()
        };
        let t = run(&s, &opts).unwrap();
        assert_eq!(check_termination_bound(&t, &s).outcome, Outcome::Inconclusive);
    }

    #[test]
    fn short_window_is_skipped() {
        let s = short_window(1, 6, 3, 30, false).unwrap();
        let t = run(&s, &RunOptions::default()).unwrap();
        assert_eq!(check_termination_bound(&t, &s).outcome, Outcome::Skipped);
        assert!(check_agreement(&t).passed());
        assert!(check_validity(&t, &s).passed());
    }

    #[test]
    fn injected_edge_breaks_underapproximation() {
        let s = window(3);
        let mut t = run(&s, &kept()).unwrap();
        let g = s.rounds.graph(2).unwrap();
        let (a, b) = s
            .rounds
            .processes()
            .flat_map(|a| s.rounds.processes().map(move |b| (a, b)))
            .find(|&(a, b)| a != b && !g.has_edge(a, b))
            .unwrap();
        t.approx_states.as_mut().unwrap()[4][0].inject_edge(a, b, 2);
        let v = check_approx_invariants(&t, &s);
        assert!(v.failed());
        let w = v.witness.unwrap();
        assert_eq!((w.round, w.processes), (5, vec![ProcessId(0)]));
    }

    #[test]
    fn missing_in_edge_breaks_completeness() {
        let s = window(4);
        let mut t = run(&s, &kept()).unwrap();
        let g = s.rounds.graph(3).unwrap();
        let (a, b) = g.edges().next().unwrap();
        let state = &mut t.approx_states.as_mut().unwrap()[5][b.index()];
        let mut stripped = ApproxState::new(b);
        for (from, to, labels) in state.edges() {
            for r in labels.iter() {
                if (from, to, r) != (a, b, 3) {
                    stripped.inject_edge(from, to, r);
                }
            }
        }
        *state = stripped;
        let v = check_approx_invariants(&t, &s);
        assert!(v.failed());
        assert_eq!(v.witness.unwrap().processes, vec![b]);
    }

    #[test]
    fn non_member_lock_breaks_discipline() {
        let s = window(5);
        let mut t = run(&s, &RunOptions::default()).unwrap();
        assert!(check_lock_discipline(&t, &s).passed());
        let r = t.first_decision().unwrap();
        let l = t.record(r).states_after.values().map(|p| p.consensus.lock_round).max().unwrap();
        let root = RoundProfile::compute(&s.rounds).single_root(l).unwrap();
        let outsider = s.rounds.processes().find(|p| !root.contains(p)).unwrap();
        t.rounds[l as usize - 1].events.push(ProcessEvent {
            process: outsider,
            event: ConsensusEvent::Lock { round: l, x: Value(0) },
        });
        let v = check_lock_discipline(&t, &s);
        assert!(v.failed());
        assert_eq!(v.witness.unwrap().processes, vec![outsider]);
    }

    #[test]
    fn verdict_display() {
        let v = CheckerVerdict::fail(
            AGREEMENT,
            Witness {
                round: 3,
                processes: vec![ProcessId(0), ProcessId(2)],
                values: vec![Value(0), Value(1)],
                detail: "x".into(),
            },
        );
        assert_eq!(v.to_string(), "AGREEMENT: fail (round 3, processes [0,2], values [0,1]: x)");
        assert_eq!(
            CheckerVerdict::other(TERMINATION, Outcome::Skipped, "why").to_string(),
            "TERMINATION: skipped (why)"
        );
    }
}
