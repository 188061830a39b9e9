//! Vertex-stable intervals, causal diameters of intervals, D-boundedness and
//! the search for the first stability window.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::causal::{
    component_round_diameter, interval_diameter, network_round_diameter, CausalDistance,
};
use super::graph::{is_exact_scc, root_components, GraphSequence, ProcessId, RootReport, Round};
use super::GraphError;

/// Closed round interval `[start, end]`, `1 <= start <= end`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Interval {
    pub start: Round,
    pub end: Round,
}

impl Interval {
    pub fn new(start: Round, end: Round) -> Self {
        Interval { start, end }
    }

    pub fn len(&self) -> u32 {
        if self.end < self.start {
            0
        } else {
            self.end - self.start + 1
        }
    }

    pub fn is_empty(&self) -> bool {
        self.end < self.start
    }

    pub fn rounds(&self) -> std::ops::RangeInclusive<Round> {
        self.start..=self.end
    }

    pub fn contains(&self, r: Round) -> bool {
        self.start <= r && r <= self.end
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{},{}]", self.start, self.end)
    }
}

/// Oracle summary of a vertex-stable SCC or root component over an interval.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StableIntervalReport {
    pub interval: Interval,
    pub vertex_set: BTreeSet<ProcessId>,
    pub per_round_diameter: BTreeMap<Round, CausalDistance>,
    pub interval_diameter: CausalDistance,
    /// Smallest `D` for which the component is D-bounded over the interval.
    pub d_bounded_for: Option<u32>,
}

/// Maximal vertex-stable root intervals, plus the rounds that have more than
/// one root component (those rounds belong to no interval).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StableIntervals {
    pub intervals: Vec<StableIntervalReport>,
    pub multi_root_rounds: Vec<Round>,
}

/// Per-round root components and network causal diameters of a sequence.
///
/// Computing `D^x` for every round is the expensive part of most oracle
/// queries, so callers that ask several questions share one profile.
#[derive(Clone, Debug)]
pub struct RoundProfile {
    roots: Vec<RootReport>,
    network: Vec<Option<CausalDistance>>,
}

impl RoundProfile {
    pub fn compute(seq: &GraphSequence) -> Self {
        let roots: Vec<RootReport> = seq.rounds().iter().map(root_components).collect();
        let network = roots
            .iter()
            .enumerate()
            .map(|(i, rep)| {
                rep.single()
                    .map(|root| network_round_diameter(seq, i as Round + 1, root.members()))
            })
            .collect();
        RoundProfile { roots, network }
    }

    pub fn horizon(&self) -> Round {
        self.roots.len() as Round
    }

    pub fn roots(&self, r: Round) -> &RootReport {
        &self.roots[r as usize - 1]
    }

    /// The unique root of round `r` as a set, if there is exactly one.
    pub fn single_root(&self, r: Round) -> Option<BTreeSet<ProcessId>> {
        self.roots(r).single().map(|c| c.to_set())
    }

    /// `D^r`, defined only for single-root rounds.
    pub fn network_diameter(&self, r: Round) -> Option<CausalDistance> {
        self.network[r as usize - 1]
    }

    pub fn multi_root_rounds(&self) -> Vec<Round> {
        (1..=self.horizon())
            .filter(|&r| !self.roots(r).is_single)
            .collect()
    }

    /// Maximal intervals whose single root keeps the same vertex set.
    pub fn maximal_root_intervals(&self) -> Vec<(Interval, BTreeSet<ProcessId>)> {
        let mut out: Vec<(Interval, BTreeSet<ProcessId>)> = Vec::new();
        let mut current: Option<(Interval, BTreeSet<ProcessId>)> = None;
        for r in 1..=self.horizon() {
            match (self.single_root(r), current.take()) {
                (Some(root), Some((iv, set))) if set == root => {
                    current = Some((Interval::new(iv.start, r), set));
                }
                (Some(root), prev) => {
                    out.extend(prev);
                    current = Some((Interval::new(r, r), root));
                }
                (None, prev) => out.extend(prev),
            }
        }
        out.extend(current);
        out
    }

    /// `D^I` for a single-root interval.
    pub fn network_interval_diameter(&self, iv: Interval) -> Result<CausalDistance, GraphError> {
        let mut per = Vec::with_capacity(iv.len() as usize);
        for x in iv.rounds() {
            let d = self
                .network_diameter(x)
                .ok_or(GraphError::MultipleRoots { round: x })?;
            per.push((x, d));
        }
        Ok(interval_diameter(per, iv.end))
    }

    /// Root-component D-boundedness: `D >= D^I` and `D^{s-D+1} <= D`.
    /// The late-start round is clamped to the interval start when `D > |I|`.
    pub fn root_d_bounded(&self, iv: Interval, d: u32) -> Result<bool, GraphError> {
        let di = self.network_interval_diameter(iv)?;
        let late = late_start(iv, d);
        let dl = self
            .network_diameter(late)
            .ok_or(GraphError::MultipleRoots { round: late })?;
        Ok(di.at_most(d) && dl.at_most(d))
    }

    fn min_root_bound(&self, iv: Interval) -> Option<u32> {
        (1..=self.horizon() + 1).find(|&d| self.root_d_bounded(iv, d).unwrap_or(false))
    }

    fn stable_report(&self, iv: Interval, set: BTreeSet<ProcessId>) -> StableIntervalReport {
        let per_round_diameter: BTreeMap<Round, CausalDistance> = iv
            .rounds()
            .map(|x| (x, self.network_diameter(x).expect("single root")))
            .collect();
        let interval_diameter = interval_diameter(per_round_diameter.clone(), iv.end);
        StableIntervalReport {
            interval: iv,
            vertex_set: set,
            per_round_diameter,
            interval_diameter,
            d_bounded_for: self.min_root_bound(iv),
        }
    }

    /// Checks the assumption that rules the termination bound, for a given `D`.
    pub fn assumption_report(&self, d: u32) -> RstReport {
        let window = 4 * d + 2;
        let mut r_st = None;
        let mut unbounded = Vec::new();
        for (iv, _) in self.maximal_root_intervals() {
            if iv.len() >= d {
                'outer: for a in iv.rounds() {
                    for b in (a + d - 1)..=iv.end {
                        let sub = Interval::new(a, b);
                        if !self.root_d_bounded(sub, d).expect("single root") {
                            unbounded.push(sub);
                            break 'outer;
                        }
                    }
                }
            }
            if r_st.is_none() && iv.len() >= window {
                r_st = (iv.start..=iv.end + 1 - window).find(|&a| {
                    self.root_d_bounded(Interval::new(a, a + window - 1), d)
                        .expect("single root")
                });
            }
        }
        RstReport {
            d,
            r_st,
            multi_root_rounds: self.multi_root_rounds(),
            unbounded_intervals: unbounded,
        }
    }
}

fn late_start(iv: Interval, d: u32) -> Round {
    (iv.end + 1).saturating_sub(d).max(iv.start)
}

/// Outcome of the search for the first stability window of length `4D+2`,
/// together with the other clauses of the assumption.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RstReport {
    pub d: u32,
    pub r_st: Option<Round>,
    /// Rounds whose graph has more than one root component.
    pub multi_root_rounds: Vec<Round>,
    /// Vertex-stable root intervals with `|I| >= D` that are not D-bounded
    /// (first offending sub-interval per maximal interval).
    pub unbounded_intervals: Vec<Interval>,
}

impl RstReport {
    /// Every round has one root and every long-enough stable root is D-bounded.
    pub fn safety_clauses_hold(&self) -> bool {
        self.multi_root_rounds.is_empty() && self.unbounded_intervals.is_empty()
    }

    pub fn assumption_holds(&self) -> bool {
        self.safety_clauses_hold() && self.r_st.is_some()
    }

    /// The round by which every process must have decided, `r_ST + 4D + 1`.
    pub fn termination_bound(&self) -> Option<Round> {
        self.r_st.map(|r| r + 4 * self.d + 1)
    }
}

pub fn vertex_stable_intervals(seq: &GraphSequence) -> StableIntervals {
    let profile = RoundProfile::compute(seq);
    stable_intervals_from(&profile)
}

pub fn stable_intervals_from(profile: &RoundProfile) -> StableIntervals {
    StableIntervals {
        intervals: profile
            .maximal_root_intervals()
            .into_iter()
            .map(|(iv, set)| profile.stable_report(iv, set))
            .collect(),
        multi_root_rounds: profile.multi_root_rounds(),
    }
}

fn check_interval(seq: &GraphSequence, iv: Interval) -> Result<(), GraphError> {
    if iv.start == 0 || iv.end < iv.start || iv.end > seq.horizon() {
        return Err(GraphError::BadInterval {
            interval: iv,
            horizon: seq.horizon(),
        });
    }
    Ok(())
}

fn check_vertex_stable(
    seq: &GraphSequence,
    iv: Interval,
    members: &BTreeSet<ProcessId>,
) -> Result<(), GraphError> {
    check_interval(seq, iv)?;
    for r in iv.rounds() {
        if !is_exact_scc(seq.graph(r).expect("in range"), members) {
            return Err(GraphError::NotVertexStable { round: r });
        }
    }
    Ok(())
}

/// `D(C^I)` together with the per-round `D^x(C^I)` values.
pub fn scc_causal_diameter(
    seq: &GraphSequence,
    iv: Interval,
    members: &BTreeSet<ProcessId>,
) -> Result<StableIntervalReport, GraphError> {
    check_vertex_stable(seq, iv, members)?;
    let per_round_diameter: BTreeMap<Round, CausalDistance> = iv
        .rounds()
        .map(|x| (x, component_round_diameter(seq, x, members)))
        .collect();
    let interval_diameter = interval_diameter(per_round_diameter.clone(), iv.end);
    let d_bounded_for = (1..=seq.horizon() + 1).find(|&d| {
        let late = late_start(iv, d);
        interval_diameter.at_most(d) && per_round_diameter[&late].at_most(d)
    });
    Ok(StableIntervalReport {
        interval: iv,
        vertex_set: members.clone(),
        per_round_diameter,
        interval_diameter,
        d_bounded_for,
    })
}

/// `D-bounded` for a vertex-stable SCC: `D >= D(C^I)` and `D^{s-D+1}(C^I) <= D`.
pub fn check_d_bounded(
    seq: &GraphSequence,
    iv: Interval,
    members: &BTreeSet<ProcessId>,
    d: u32,
) -> Result<bool, GraphError> {
    if d == 0 {
        return Err(GraphError::ZeroBound);
    }
    let report = scc_causal_diameter(seq, iv, members)?;
    let late = late_start(iv, d);
    Ok(report.interval_diameter.at_most(d) && report.per_round_diameter[&late].at_most(d))
}

/// `D-bounded` for the vertex-stable root component of `iv`.
pub fn check_root_d_bounded(seq: &GraphSequence, iv: Interval, d: u32) -> Result<bool, GraphError> {
    if d == 0 {
        return Err(GraphError::ZeroBound);
    }
    check_interval(seq, iv)?;
    let profile = RoundProfile::compute(seq);
    let first = profile
        .single_root(iv.start)
        .ok_or(GraphError::MultipleRoots { round: iv.start })?;
    for r in iv.rounds() {
        match profile.single_root(r) {
            None => return Err(GraphError::MultipleRoots { round: r }),
            Some(root) if root != first => return Err(GraphError::NotVertexStable { round: r }),
            Some(_) => {}
        }
    }
    profile.root_d_bounded(iv, d)
}

/// Network causal diameter `D^I` of a single-root interval.
pub fn network_causal_diameter(
    seq: &GraphSequence,
    iv: Interval,
) -> Result<CausalDistance, GraphError> {
    check_interval(seq, iv)?;
    RoundProfile::compute(seq).network_interval_diameter(iv)
}

/// First round `r` such that `[r, r+4D+1]` hosts a D-bounded vertex-stable
/// root component, plus the checks of the remaining assumption clauses.
pub fn find_r_st(seq: &GraphSequence, d: u32) -> Result<RstReport, GraphError> {
    if d == 0 {
        return Err(GraphError::ZeroBound);
    }
    Ok(RoundProfile::compute(seq).assumption_report(d))
}

/// First round `r` such that `[r, r+D]` hosts a vertex-stable root
/// component with `D^I <= D` (the weaker window that only covers one flood).
pub fn find_short_window(seq: &GraphSequence, d: u32) -> Result<Option<Round>, GraphError> {
    if d == 0 {
        return Err(GraphError::ZeroBound);
    }
    let profile = RoundProfile::compute(seq);
    for (iv, _) in profile.maximal_root_intervals() {
        if iv.len() < d + 1 {
            continue;
        }
        for a in iv.start..=iv.end - d {
            if profile
                .network_interval_diameter(Interval::new(a, a + d))?
                .at_most(d)
            {
                return Ok(Some(a));
            }
        }
    }
    Ok(None)
}
