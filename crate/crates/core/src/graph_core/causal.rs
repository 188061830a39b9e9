//! Causal distances over the time-expanded graph of a sequence.
//!
//! A chain of length `k` starting at `p` in round `r` uses the edges of
//! rounds `r, r+1, ..., r+k-1`, and a process always influences itself, so
//! the informed set after `k` steps is the breadth-first layer `k` of the
//! time-expanded graph with layers `(process, round)`. All results are
//! relative to the horizon `T`: a chain that would need round `T+1` counts
//! as absent.

use std::collections::BTreeSet;
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::graph::{GraphSequence, ProcessId, Round};
use super::GraphError;

/// Length of the shortest causal chain, or infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CausalDistance {
    Finite(u32),
    Infinite,
}

impl CausalDistance {
    pub fn is_finite(self) -> bool {
        matches!(self, CausalDistance::Finite(_))
    }

    pub fn finite(self) -> Option<u32> {
        match self {
            CausalDistance::Finite(k) => Some(k),
            CausalDistance::Infinite => None,
        }
    }

    /// `x + d - 1 <= s`: a propagation started in round `x` completes by round `s`.
    pub fn ends_by(self, x: Round, s: Round) -> bool {
        match self {
            CausalDistance::Finite(d) => x as u64 + d as u64 - 1 <= s as u64,
            CausalDistance::Infinite => false,
        }
    }

    /// `self <= bound` with infinity never bounded.
    pub fn at_most(self, bound: u32) -> bool {
        matches!(self, CausalDistance::Finite(d) if d <= bound)
    }
}

impl fmt::Display for CausalDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CausalDistance::Finite(k) => write!(f, "{k}"),
            CausalDistance::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for CausalDistance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            CausalDistance::Finite(k) => s.serialize_u32(*k),
            CausalDistance::Infinite => s.serialize_none(),
        }
    }
}

impl<'de> Deserialize<'de> for CausalDistance {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(match Option::<u32>::deserialize(d)? {
            Some(k) => CausalDistance::Finite(k),
            None => CausalDistance::Infinite,
        })
    }
}

/// Causal distances from `p`, starting in round `r`, to every process.
///
/// Stops as soon as everybody is informed or the horizon is exhausted.
pub fn distances_from(seq: &GraphSequence, r: Round, p: ProcessId) -> Vec<CausalDistance> {
    let n = seq.n();
    let mut dist = vec![CausalDistance::Infinite; n];
    if r == 0 || r > seq.horizon() {
        return dist;
    }
    let mut informed = FixedBitSet::with_capacity(n);
    informed.insert(p.index());
    dist[p.index()] = CausalDistance::Finite(1);
    let mut count = 1;
    let mut k = 1u32;
    let mut round = r;
    while round <= seq.horizon() {
        let g = seq.graph(round).expect("round within horizon");
        let mut next = informed.clone();
        for v in informed.ones() {
            next.union_with(g.out_mask(v));
        }
        for q in next.difference(&informed) {
            dist[q] = CausalDistance::Finite(k);
            count += 1;
        }
        informed = next;
        if count == n {
            break;
        }
        k += 1;
        round += 1;
    }
    dist
}

/// `cd_r(p, q)`.
pub fn causal_distance(
    seq: &GraphSequence,
    r: Round,
    p: ProcessId,
    q: ProcessId,
) -> Result<CausalDistance, GraphError> {
    check_round(seq, r)?;
    check_process(seq, p)?;
    check_process(seq, q)?;
    Ok(distances_from(seq, r, p)[q.index()])
}

pub(crate) fn check_round(seq: &GraphSequence, r: Round) -> Result<(), GraphError> {
    if r == 0 || r > seq.horizon() {
        return Err(GraphError::OutOfRange {
            round: r,
            horizon: seq.horizon(),
        });
    }
    Ok(())
}

pub(crate) fn check_process(seq: &GraphSequence, p: ProcessId) -> Result<(), GraphError> {
    if p.index() >= seq.n() {
        return Err(GraphError::UnknownProcess { process: p, n: seq.n() });
    }
    Ok(())
}

/// `D^x(C)`: largest `cd_x(p, q)` over `p, q` in `members`.
pub fn component_round_diameter(
    seq: &GraphSequence,
    x: Round,
    members: &BTreeSet<ProcessId>,
) -> CausalDistance {
    let mut worst = CausalDistance::Finite(1);
    for &p in members {
        let d = distances_from(seq, x, p);
        for q in members {
            worst = worst.max(d[q.index()]);
        }
        if worst == CausalDistance::Infinite {
            break;
        }
    }
    worst
}

/// `D^x`: largest `cd_x(p, q)` over `p` in `sources` (the root of round `x`)
/// and every process `q`.
pub fn network_round_diameter(
    seq: &GraphSequence,
    x: Round,
    sources: &[ProcessId],
) -> CausalDistance {
    let mut worst = CausalDistance::Finite(1);
    for &p in sources {
        let d = distances_from(seq, x, p);
        worst = worst.max(d.into_iter().max().unwrap_or(CausalDistance::Finite(1)));
        if worst == CausalDistance::Infinite {
            break;
        }
    }
    worst
}

/// Interval diameter from per-round values: the largest `D^x` among the
/// rounds `x` in `[r, s]` whose propagation completes by `s`, or infinity
/// when no round qualifies.
pub fn interval_diameter<I>(per_round: I, s: Round) -> CausalDistance
where
    I: IntoIterator<Item = (Round, CausalDistance)>,
{
    per_round
        .into_iter()
        .filter(|&(x, d)| d.ends_by(x, s))
        .map(|(_, d)| d)
        .max()
        .unwrap_or(CausalDistance::Infinite)
}
