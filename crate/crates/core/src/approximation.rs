//! Local network approximation.
//!
//! Each process keeps a labeled digraph `A_p`: an edge `v -> w` carries the
//! set of rounds in which the process has learned that `w` heard from `v`.
//! Every round the whole graph is broadcast, and receivers add their own
//! in-edges and take the label-wise union of everything they hear. From
//! the round-`s` slice of `A_p` a process decides whether it was part of
//! the root component of round `s`.

use std::collections::{BTreeMap, BTreeSet};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::graph_core::{Interval, ProcessId, Round};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ApproxError {
    #[error("malformed approximation message from {sender}: {reason}")]
    MalformedMessage { sender: ProcessId, reason: String },
}

fn malformed(sender: ProcessId, reason: impl Into<String>) -> ApproxError {
    ApproxError::MalformedMessage {
        sender,
        reason: reason.into(),
    }
}

/// A set of round numbers, stored as a bitset indexed by round.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RoundSet(FixedBitSet);

impl RoundSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, r: Round) {
        let i = r as usize;
        if i >= self.0.len() {
            self.0.grow(i + 1);
        }
        self.0.insert(i);
    }

    pub fn contains(&self, r: Round) -> bool {
        self.0.contains(r as usize)
    }

    pub fn union_with(&mut self, other: &RoundSet) {
        self.0.union_with(&other.0);
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn iter(&self) -> impl Iterator<Item = Round> + '_ {
        self.0.ones().map(|i| i as Round)
    }

    pub fn min(&self) -> Option<Round> {
        self.iter().next()
    }

    pub fn max(&self) -> Option<Round> {
        self.0.maximum().map(|i| i as Round)
    }

    /// Drops every round `< keep_after`.
    pub fn retain_from(&mut self, keep_after: Round) {
        let upto = (keep_after as usize).min(self.0.len());
        self.0.remove_range(..upto);
    }
}

impl FromIterator<Round> for RoundSet {
    fn from_iter<I: IntoIterator<Item = Round>>(iter: I) -> Self {
        let mut s = RoundSet::new();
        for r in iter {
            s.insert(r);
        }
        s
    }
}

impl Serialize for RoundSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for RoundSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(Vec::<Round>::deserialize(d)?.into_iter().collect())
    }
}

/// One edge of `A_p` with its round labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledEdge {
    pub from: ProcessId,
    pub to: ProcessId,
    pub labels: RoundSet,
}

/// The approximation graph `A_p` of one process.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "StateRepr", try_from = "StateRepr")]
pub struct ApproxState {
    owner: ProcessId,
    vertices: BTreeSet<ProcessId>,
    edges: BTreeMap<(ProcessId, ProcessId), RoundSet>,
}

#[derive(Serialize, Deserialize)]
struct StateRepr {
    owner: ProcessId,
    vertices: Vec<ProcessId>,
    edges: Vec<LabeledEdge>,
}

impl From<ApproxState> for StateRepr {
    fn from(s: ApproxState) -> Self {
        StateRepr {
            owner: s.owner,
            vertices: s.vertices.into_iter().collect(),
            edges: s
                .edges
                .into_iter()
                .map(|((from, to), labels)| LabeledEdge { from, to, labels })
                .collect(),
        }
    }
}

impl TryFrom<StateRepr> for ApproxState {
    type Error = ApproxError;

    fn try_from(r: StateRepr) -> Result<Self, Self::Error> {
        let mut edges = BTreeMap::new();
        for e in r.edges {
            if edges.insert((e.from, e.to), e.labels).is_some() {
                return Err(malformed(r.owner, format!("duplicate edge {}->{}", e.from, e.to)));
            }
        }
        let state = ApproxState {
            owner: r.owner,
            vertices: r.vertices.into_iter().collect(),
            edges,
        };
        state.validate(r.owner, Round::MAX)?;
        Ok(state)
    }
}

/// What a process broadcasts: a snapshot of its approximation graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproxMessage {
    pub sender: ProcessId,
    pub graph: ApproxState,
}

/// The round-`s` slice `A_p|s`: edges whose labels contain `s`, over the
/// owner plus the endpoints of those edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproxSlice {
    pub vertices: BTreeSet<ProcessId>,
    pub edges: BTreeSet<(ProcessId, ProcessId)>,
}

impl ApproxSlice {
    /// Strong connectivity; a single vertex without edges counts as connected.
    pub fn is_strongly_connected(&self) -> bool {
        let Some(&start) = self.vertices.iter().next() else {
            return false;
        };
        let fwd = self.reach(start, false);
        fwd.len() == self.vertices.len() && self.reach(start, true).len() == self.vertices.len()
    }

    fn reach(&self, start: ProcessId, backwards: bool) -> BTreeSet<ProcessId> {
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.edges {
                let (src, dst) = if backwards { (b, a) } else { (a, b) };
                if src == v && seen.insert(dst) {
                    stack.push(dst);
                }
            }
        }
        seen
    }
}

impl ApproxState {
    /// `({p}, {})`.
    pub fn new(owner: ProcessId) -> Self {
        ApproxState {
            owner,
            vertices: BTreeSet::from([owner]),
            edges: BTreeMap::new(),
        }
    }

    pub fn owner(&self) -> ProcessId {
        self.owner
    }

    pub fn vertices(&self) -> &BTreeSet<ProcessId> {
        &self.vertices
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn labels(&self, from: ProcessId, to: ProcessId) -> Option<&RoundSet> {
        self.edges.get(&(from, to))
    }

    pub fn edges(&self) -> impl Iterator<Item = (ProcessId, ProcessId, &RoundSet)> {
        self.edges.iter().map(|(&(a, b), l)| (a, b, l))
    }

    /// Inserts a label directly. Only meant for fault injection in tests of
    /// the checkers; the protocol never calls it.
    pub fn inject_edge(&mut self, from: ProcessId, to: ProcessId, round: Round) {
        self.vertices.insert(from);
        self.vertices.insert(to);
        self.edges.entry((from, to)).or_default().insert(round);
    }

    pub fn emit(&self) -> ApproxMessage {
        ApproxMessage {
            sender: self.owner,
            graph: self.clone(),
        }
    }

    fn validate(&self, sender: ProcessId, max_label: Round) -> Result<(), ApproxError> {
        if self.owner != sender {
            return Err(malformed(
                sender,
                format!("snapshot owned by {}", self.owner),
            ));
        }
        if !self.vertices.contains(&self.owner) {
            return Err(malformed(sender, "owner missing from vertex set"));
        }
        for (&(a, b), labels) in &self.edges {
            if a == b {
                return Err(malformed(sender, format!("self-loop at {a}")));
            }
            if !self.vertices.contains(&a) || !self.vertices.contains(&b) {
                return Err(malformed(sender, format!("edge {a}->{b} leaves the vertex set")));
            }
            if labels.is_empty() {
                return Err(malformed(sender, format!("edge {a}->{b} has no labels")));
            }
            if labels.contains(0) || labels.max().is_some_and(|m| m > max_label) {
                return Err(malformed(
                    sender,
                    format!("edge {a}->{b} carries a label outside [1, {max_label}]"),
                ));
            }
        }
        Ok(())
    }

    /// Round-`r` computation: record the in-edges from every sender and
    /// merge all received graphs label-wise.
    ///
    /// `received` must hold exactly one message per in-neighbor of round `r`.
    /// Nothing is modified if any message is malformed.
    pub fn absorb(&mut self, r: Round, received: &[&ApproxMessage]) -> Result<(), ApproxError> {
        let mut senders = BTreeSet::new();
        for m in received {
            if m.sender == self.owner {
                return Err(malformed(m.sender, "message delivered to its own sender"));
            }
            if !senders.insert(m.sender) {
                return Err(malformed(m.sender, "duplicate message in one round"));
            }
            m.graph.validate(m.sender, r.saturating_sub(1))?;
        }
        for m in received {
            self.edges.entry((m.sender, self.owner)).or_default().insert(r);
            self.vertices.extend(m.graph.vertices.iter().copied());
        }
        for m in received {
            for (&key, labels) in &m.graph.edges {
                self.edges.entry(key).or_default().union_with(labels);
            }
        }
        Ok(())
    }

    /// `A_p|s`.
    pub fn restrict(&self, s: Round) -> ApproxSlice {
        let edges: BTreeSet<(ProcessId, ProcessId)> = self
            .edges
            .iter()
            .filter(|(_, l)| l.contains(s))
            .map(|(&k, _)| k)
            .collect();
        let mut vertices = BTreeSet::from([self.owner]);
        for &(a, b) in &edges {
            vertices.insert(a);
            vertices.insert(b);
        }
        ApproxSlice { vertices, edges }
    }

    /// `V(C_p|s)`: the vertices of `A_p|s` if it is strongly connected, else
    /// the empty set.
    pub fn detected_component(&self, s: Round) -> BTreeSet<ProcessId> {
        let slice = self.restrict(s);
        if slice.is_strongly_connected() {
            slice.vertices
        } else {
            BTreeSet::new()
        }
    }

    /// `inStableRoot(I)` evaluated during round `current`: every `s` in `I`
    /// must be a past round, and the detected components over `I` must be
    /// one and the same nonempty set.
    pub fn in_stable_root(&self, iv: Interval, current: Round) -> bool {
        if iv.start < 1 || iv.end < iv.start || iv.end >= current {
            return false;
        }
        let first = self.detected_component(iv.start);
        if first.is_empty() {
            return false;
        }
        (iv.start + 1..=iv.end).all(|s| self.detected_component(s) == first)
    }

    /// Drops labels older than `keep_after` and edges left without labels.
    /// Vertices are kept.
    pub fn prune(&mut self, keep_after: Round) {
        if keep_after == 0 {
            return;
        }
        self.edges.retain(|_, labels| {
            labels.retain_from(keep_after);
            !labels.is_empty()
        });
    }

    /// Canonical JSON: sorted vertices, sorted edges, sorted labels.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("approximation state serializes")
    }

    /// SHA-256 of the canonical JSON, hex encoded.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pid(i: u32) -> ProcessId {
        ProcessId(i)
    }

    fn labels(rs: &[Round]) -> RoundSet {
        rs.iter().copied().collect()
    }

    #[test]
    fn init_is_singleton() {
        let s = ApproxState::new(pid(3));
        assert_eq!(s.vertices(), &BTreeSet::from([pid(3)]));
        assert_eq!(s.edge_count(), 0);
        assert_eq!(s, ApproxState::new(pid(3)));
    }

    #[test]
    fn emit_is_a_faithful_pure_snapshot() {
        let mut s = ApproxState::new(pid(0));
        let q = ApproxState::new(pid(1)).emit();
        s.absorb(1, &[&q]).unwrap();
        let before = s.clone();
        let m1 = s.emit();
        let m2 = s.emit();
        assert_eq!(m1, m2);
        assert_eq!(m1.graph, before);
        assert_eq!(m1.graph.edge_count(), 1);
        assert_eq!(s, before);
    }

    #[test]
    fn absorb_from_fresh_neighbor() {
        let mut p = ApproxState::new(pid(0));
        let q = ApproxState::new(pid(1)).emit();
        p.absorb(1, &[&q]).unwrap();
        assert_eq!(p.vertices(), &BTreeSet::from([pid(0), pid(1)]));
        assert_eq!(p.labels(pid(1), pid(0)), Some(&labels(&[1])));
        assert_eq!(p.edge_count(), 1);
    }

    #[test]
    fn absorb_nothing_is_identity() {
        let mut p = ApproxState::new(pid(0));
        p.absorb(4, &[]).unwrap();
        assert_eq!(p, ApproxState::new(pid(0)));
    }

    #[test]
    fn absorb_unions_labels() {
        let (a, b) = (pid(2), pid(3));
        let mut p = ApproxState::new(pid(0));
        p.inject_edge(a, b, 1);
        let mut q = ApproxState::new(pid(1));
        q.inject_edge(a, b, 2);
        p.absorb(3, &[&q.emit()]).unwrap();
        assert_eq!(p.labels(a, b), Some(&labels(&[1, 2])));
        assert_eq!(p.labels(pid(1), pid(0)), Some(&labels(&[3])));
    }

    #[test]
    fn absorb_rejects_malformed_snapshots() {
        let mut p = ApproxState::new(pid(0));
        let mut q = ApproxState::new(pid(1));
        q.inject_edge(pid(2), pid(3), 5);
        let before = p.clone();
        // Label 5 cannot be known before round 5 is over.
        assert!(matches!(
            p.absorb(5, &[&q.emit()]),
            Err(ApproxError::MalformedMessage { .. })
        ));
        assert_eq!(p, before);

        let forged = ApproxMessage {
            sender: pid(4),
            graph: ApproxState::new(pid(1)),
        };
        assert!(p.absorb(2, &[&forged]).is_err());
        let own = p.emit();
        assert!(p.absorb(2, &[&own]).is_err());
    }

    #[test]
    fn restrict_filters_by_label() {
        let mut p = ApproxState::new(pid(0));
        p.inject_edge(pid(1), pid(0), 1);
        let s2 = p.restrict(2);
        assert_eq!(s2.vertices, BTreeSet::from([pid(0)]));
        assert!(s2.edges.is_empty());

        let mut p = ApproxState::new(pid(0));
        p.inject_edge(pid(1), pid(0), 1);
        p.inject_edge(pid(1), pid(0), 3);
        assert!(p.restrict(3).edges.contains(&(pid(1), pid(0))));
    }

    #[test]
    fn detected_component_rules() {
        let p = ApproxState::new(pid(0));
        assert_eq!(p.detected_component(1), BTreeSet::from([pid(0)]));

        let mut p = ApproxState::new(pid(0));
        p.inject_edge(pid(1), pid(0), 1);
        assert!(p.detected_component(1).is_empty());

        p.inject_edge(pid(0), pid(1), 1);
        assert_eq!(p.detected_component(1), BTreeSet::from([pid(0), pid(1)]));
    }

    #[test]
    fn in_stable_root_range_rules() {
        let p = ApproxState::new(pid(0));
        assert!(!p.in_stable_root(Interval::new(0, 1), 5));
        assert!(!p.in_stable_root(Interval::new(3, 5), 5));
        assert!(p.in_stable_root(Interval::new(3, 4), 5));
    }

    #[test]
    fn prune_drops_old_labels() {
        let mut p = ApproxState::new(pid(0));
        p.inject_edge(pid(1), pid(0), 1);
        p.inject_edge(pid(1), pid(0), 5);
        p.inject_edge(pid(2), pid(0), 2);
        let mut unpruned = p.clone();
        unpruned.prune(0);
        assert_eq!(unpruned, p);

        p.prune(3);
        assert_eq!(p.labels(pid(1), pid(0)), Some(&labels(&[5])));
        assert_eq!(p.labels(pid(2), pid(0)), None);
        assert!(p.vertices().contains(&pid(2)));
    }

    #[test]
    fn canonical_json_round_trip() {
        let mut p = ApproxState::new(pid(0));
        p.inject_edge(pid(2), pid(0), 4);
        p.inject_edge(pid(1), pid(0), 1);
        p.inject_edge(pid(1), pid(0), 3);
        let json = p.canonical_json();
        assert_eq!(
            json,
            r#"{"owner":0,"vertices":[0,1,2],"edges":[{"from":1,"to":0,"labels":[1,3]},{"from":2,"to":0,"labels":[4]}]}"#
        );
        let back: ApproxState = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
        assert_eq!(back.digest(), p.digest());
    }
}
