//! The lock/decide consensus state machine layered on the approximation
//! predicate.
//!
//! Undecided processes flood `(lockRound, x)` pairs and keep the
//! lexicographic maximum. A process that sees itself in a stable root
//! component `D` rounds back locks its estimate with the current round, and
//! decides once the component has stayed stable for `D` more rounds.
//! Deciders flood `DECIDE` and every undecided receiver adopts the value.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::approximation::ApproxMessage;
use crate::graph_core::{Interval, ProcessId, Round};

/// A proposal value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Value(pub i64);

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub value: Value,
    pub round: Round,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsensusState {
    pub x: Value,
    pub locked: bool,
    pub lock_round: Round,
    pub decided: bool,
    pub decision: Option<Decision>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ConsensusMessage {
    Lock { lock_round: Round, x: Value },
    Decide { x: Value },
}

/// Approximation and consensus payloads travel in one message per round.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackedMessage {
    pub approx: ApproxMessage,
    pub cons: ConsensusMessage,
}

impl PackedMessage {
    pub fn pack(approx: ApproxMessage, cons: ConsensusMessage) -> Self {
        PackedMessage { approx, cons }
    }

    pub fn unpack(self) -> (ApproxMessage, ConsensusMessage) {
        (self.approx, self.cons)
    }

    pub fn sender(&self) -> ProcessId {
        self.approx.sender
    }
}

/// What happens to `lockRound` when the lock predicate fails.
///
/// The pseudocode only clears `locked`; the correctness argument speaks of
/// processes resetting `lockRound` to 0. Both are available; the first is
/// the default.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnlockRule {
    #[default]
    KeepLockRound,
    ResetLockRound,
}

impl UnlockRule {
    pub fn is_default(&self) -> bool {
        *self == UnlockRule::KeepLockRound
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecideVia {
    /// Decided on its own locked estimate.
    Own,
    /// Adopted a value from a received `DECIDE`.
    Adopted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum ConsensusEvent {
    Lock { round: Round, x: Value },
    Unlock { round: Round },
    Decide { round: Round, value: Value, via: DecideVia },
    /// Two or more different `DECIDE` values arrived in the same round.
    ConflictingDecides { round: Round, values: Vec<Value> },
}

impl ConsensusState {
    /// `(v_p, false, 0, false)`.
    pub fn new(input: Value) -> Self {
        ConsensusState {
            x: input,
            locked: false,
            lock_round: 0,
            decided: false,
            decision: None,
        }
    }

    pub fn emit(&self) -> ConsensusMessage {
        if self.decided {
            ConsensusMessage::Decide { x: self.x }
        } else {
            ConsensusMessage::Lock {
                lock_round: self.lock_round,
                x: self.x,
            }
        }
    }

    fn decide(&mut self, r: Round, via: DecideVia, events: &mut Vec<ConsensusEvent>) {
        self.decided = true;
        self.decision = Some(Decision {
            value: self.x,
            round: r,
        });
        events.push(ConsensusEvent::Decide {
            round: r,
            value: self.x,
            via,
        });
    }

    /// Round-`r` computation. Must run after the approximation layer has
    /// absorbed the round-`r` messages; `in_stable_root` evaluates the
    /// co-located predicate for the current round.
    pub fn step<F>(
        &mut self,
        r: Round,
        received: &[&ConsensusMessage],
        d: u32,
        rule: UnlockRule,
        mut in_stable_root: F,
    ) -> Vec<ConsensusEvent>
    where
        F: FnMut(Interval) -> bool,
    {
        let mut events = Vec::new();
        if self.decided {
            return events;
        }

        let decides: BTreeSet<Value> = received
            .iter()
            .filter_map(|m| match m {
                ConsensusMessage::Decide { x } => Some(*x),
                ConsensusMessage::Lock { .. } => None,
            })
            .collect();
        if let Some(&max) = decides.iter().next_back() {
            if decides.len() > 1 {
                events.push(ConsensusEvent::ConflictingDecides {
                    round: r,
                    values: decides.iter().copied().collect(),
                });
            }
            self.x = max;
            self.decide(r, DecideVia::Adopted, &mut events);
            return events;
        }

        let (lock_round, x) = received
            .iter()
            .filter_map(|m| match m {
                ConsensusMessage::Lock { lock_round, x } => Some((*lock_round, *x)),
                ConsensusMessage::Decide { .. } => None,
            })
            .fold((self.lock_round, self.x), |acc, pair| acc.max(pair));
        self.lock_round = lock_round;
        self.x = x;

        let lock_window_start = r as i64 - d as i64 - 1;
        let stable = lock_window_start >= 1
            && in_stable_root(Interval::new(lock_window_start as Round, r - d));
        if stable {
            if !self.locked {
                self.locked = true;
                self.lock_round = r;
                events.push(ConsensusEvent::Lock { round: r, x: self.x });
            } else if self.lock_round >= 1
                && in_stable_root(Interval::new(self.lock_round, self.lock_round + d))
            {
                self.decide(r, DecideVia::Own, &mut events);
            }
        } else {
            if self.locked {
                events.push(ConsensusEvent::Unlock { round: r });
            }
            self.locked = false;
            if rule == UnlockRule::ResetLockRound {
                self.lock_round = 0;
            }
        }
        events
    }
}
