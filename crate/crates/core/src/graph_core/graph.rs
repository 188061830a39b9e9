//! Round communication graphs, finite graph sequences and the per-round
//! SCC / root-component decomposition.

use std::collections::BTreeSet;
use std::fmt;

use fixedbitset::FixedBitSet;
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::{Deserialize, Serialize};

use super::GraphError;

/// Logical round number. Rounds are 1-based; round 0 never exists.
pub type Round = u32;

/// Identifier of a simulated process, in `[0, n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProcessId(pub u32);

impl ProcessId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for ProcessId {
    fn from(i: usize) -> Self {
        ProcessId(i as u32)
    }
}

impl fmt::Display for ProcessId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One directed communication graph: `(p -> q)` means `q` receives `p`'s
/// message of that round. Simple, loop-free, endpoints in `[0, n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundGraph {
    n: usize,
    edges: BTreeSet<(ProcessId, ProcessId)>,
    out: Vec<FixedBitSet>,
    inn: Vec<Vec<ProcessId>>,
    outv: Vec<Vec<ProcessId>>,
}

impl RoundGraph {
    pub fn new<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (ProcessId, ProcessId)>,
    {
        if n == 0 {
            return Err(GraphError::EmptyProcessSet);
        }
        let mut set = BTreeSet::new();
        for (p, q) in edges {
            if p.index() >= n || q.index() >= n {
                return Err(GraphError::EndpointOutOfRange { from: p, to: q, n });
            }
            if p == q {
                return Err(GraphError::SelfLoop(p));
            }
            if !set.insert((p, q)) {
                return Err(GraphError::DuplicateEdge { from: p, to: q });
            }
        }
        Ok(Self::from_set(n, set))
    }

    /// Builds a graph from raw index pairs, silently dropping self-loops and
    /// duplicates. Used by generators, which work on plain indices.
    pub(crate) fn from_pairs<I>(n: usize, pairs: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let set = pairs
            .into_iter()
            .filter(|(a, b)| a != b)
            .map(|(a, b)| {
                debug_assert!(a < n && b < n);
                (ProcessId::from(a), ProcessId::from(b))
            })
            .collect();
        Self::from_set(n, set)
    }

    fn from_set(n: usize, edges: BTreeSet<(ProcessId, ProcessId)>) -> Self {
        let mut out = vec![FixedBitSet::with_capacity(n); n];
        let mut inn = vec![Vec::new(); n];
        let mut outv = vec![Vec::new(); n];
        for &(p, q) in &edges {
            out[p.index()].insert(q.index());
            outv[p.index()].push(q);
            inn[q.index()].push(p);
        }
        for v in &mut inn {
            v.sort_unstable();
        }
        RoundGraph {
            n,
            edges,
            out,
            inn,
            outv,
        }
    }

    pub fn empty(n: usize) -> Result<Self, GraphError> {
        Self::new(n, std::iter::empty())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (ProcessId, ProcessId)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, from: ProcessId, to: ProcessId) -> bool {
        self.edges.contains(&(from, to))
    }

    /// `N_p^r`: the processes `p` hears from in this round, sorted.
    pub fn in_neighbors(&self, p: ProcessId) -> &[ProcessId] {
        &self.inn[p.index()]
    }

    pub fn out_neighbors(&self, p: ProcessId) -> &[ProcessId] {
        &self.outv[p.index()]
    }

    pub(crate) fn out_mask(&self, p: usize) -> &FixedBitSet {
        &self.out[p]
    }

    pub fn processes(&self) -> impl Iterator<Item = ProcessId> {
        (0..self.n).map(ProcessId::from)
    }
}

/// A finite prefix `G^1, ..., G^T` of the adversary's graph sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphSequence {
    n: usize,
    rounds: Vec<RoundGraph>,
}

impl GraphSequence {
    pub fn new(n: usize, rounds: Vec<RoundGraph>) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::EmptyProcessSet);
        }
        if rounds.is_empty() {
            return Err(GraphError::EmptySequence);
        }
        if let Some((i, g)) = rounds.iter().enumerate().find(|(_, g)| g.n() != n) {
            return Err(GraphError::ProcessCountMismatch {
                round: i as Round + 1,
                expected: n,
                found: g.n(),
            });
        }
        Ok(GraphSequence { n, rounds })
    }

    /// The same graph repeated for `horizon` rounds.
    pub fn repeat(graph: RoundGraph, horizon: usize) -> Result<Self, GraphError> {
        let n = graph.n();
        Self::new(n, vec![graph; horizon])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The horizon `T`.
    pub fn horizon(&self) -> Round {
        self.rounds.len() as Round
    }

    /// `G^r` for `1 <= r <= T`.
    pub fn graph(&self, r: Round) -> Option<&RoundGraph> {
        if r == 0 {
            return None;
        }
        self.rounds.get(r as usize - 1)
    }

    pub fn rounds(&self) -> &[RoundGraph] {
        &self.rounds
    }

    /// Truncates or keeps the sequence so that its horizon is at most `horizon`.
    pub fn prefix(&self, horizon: Round) -> Result<Self, GraphError> {
        let t = (horizon as usize).min(self.rounds.len());
        Self::new(self.n, self.rounds[..t].to_vec())
    }

    pub fn processes(&self) -> impl Iterator<Item = ProcessId> {
        (0..self.n).map(ProcessId::from)
    }
}

/// A maximal strongly connected component of one round graph.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Scc(Vec<ProcessId>);

impl Scc {
    pub(crate) fn from_sorted(members: Vec<ProcessId>) -> Self {
        debug_assert!(!members.is_empty());
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        Scc(members)
    }

    pub fn members(&self) -> &[ProcessId] {
        &self.0
    }

    pub fn contains(&self, p: ProcessId) -> bool {
        self.0.binary_search(&p).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_set(&self) -> BTreeSet<ProcessId> {
        self.0.iter().copied().collect()
    }
}

impl fmt::Display for Scc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

/// The root components of one round graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootReport {
    pub roots: Vec<Scc>,
    pub is_single: bool,
}

impl RootReport {
    /// The unique root component, if there is exactly one.
    pub fn single(&self) -> Option<&Scc> {
        if self.is_single {
            self.roots.first()
        } else {
            None
        }
    }
}

/// Partition of the process set into maximal SCCs, ordered by smallest member.
pub fn scc_decompose(g: &RoundGraph) -> Vec<Scc> {
    let mut pg: DiGraph<(), ()> = DiGraph::with_capacity(g.n(), g.edge_count());
    for _ in 0..g.n() {
        pg.add_node(());
    }
    for (p, q) in g.edges() {
        pg.add_edge(NodeIndex::new(p.index()), NodeIndex::new(q.index()), ());
    }
    let mut sccs: Vec<Scc> = tarjan_scc(&pg)
        .into_iter()
        .map(|comp| {
            let mut members: Vec<ProcessId> =
                comp.into_iter().map(|ix| ProcessId::from(ix.index())).collect();
            members.sort_unstable();
            Scc::from_sorted(members)
        })
        .collect();
    sccs.sort_by_key(|c| c.members()[0]);
    sccs
}

/// SCCs without in-edges from outside the component.
pub fn root_components(g: &RoundGraph) -> RootReport {
    let sccs = scc_decompose(g);
    let mut comp_of = vec![0usize; g.n()];
    for (i, c) in sccs.iter().enumerate() {
        for p in c.members() {
            comp_of[p.index()] = i;
        }
    }
    let mut has_in = vec![false; sccs.len()];
    for (p, q) in g.edges() {
        let (cp, cq) = (comp_of[p.index()], comp_of[q.index()]);
        if cp != cq {
            has_in[cq] = true;
        }
    }
    let roots: Vec<Scc> = sccs
        .into_iter()
        .zip(has_in)
        .filter_map(|(c, incoming)| (!incoming).then_some(c))
        .collect();
    RootReport {
        is_single: roots.len() == 1,
        roots,
    }
}

/// True iff `members` is exactly one SCC of `g`.
pub fn is_exact_scc(g: &RoundGraph, members: &BTreeSet<ProcessId>) -> bool {
    let Some(&first) = members.iter().next() else {
        return false;
    };
    let fwd = reach(g, first, false);
    let bwd = reach(g, first, true);
    let both: BTreeSet<ProcessId> = g
        .processes()
        .filter(|p| fwd[p.index()] && bwd[p.index()])
        .collect();
    &both == members
}

fn reach(g: &RoundGraph, start: ProcessId, backwards: bool) -> Vec<bool> {
    let mut seen = vec![false; g.n()];
    let mut stack = vec![start];
    seen[start.index()] = true;
    while let Some(v) = stack.pop() {
        let next = if backwards {
            g.in_neighbors(v)
        } else {
            g.out_neighbors(v)
        };
        for &w in next {
            if !seen[w.index()] {
                seen[w.index()] = true;
                stack.push(w);
            }
        }
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pid(i: u32) -> ProcessId {
        ProcessId(i)
    }

    fn graph(n: usize, edges: &[(u32, u32)]) -> RoundGraph {
        RoundGraph::new(n, edges.iter().map(|&(a, b)| (pid(a), pid(b)))).unwrap()
    }

    /// Brute-force pairwise reachability partition.
    fn brute_sccs(g: &RoundGraph) -> Vec<Vec<ProcessId>> {
        let n = g.n();
        let reach_all: Vec<Vec<bool>> = (0..n).map(|i| reach(g, pid(i as u32), false)).collect();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for i in 0..n {
            if seen[i] {
                continue;
            }
            let comp: Vec<ProcessId> = (0..n)
                .filter(|&j| reach_all[i][j] && reach_all[j][i])
                .map(|j| pid(j as u32))
                .collect();
            for p in &comp {
                seen[p.index()] = true;
            }
            out.push(comp);
        }
        out
    }

    // Five processes where 3 is the only root; 4 sits in no cycle.
    fn five_process_graph() -> RoundGraph {
        graph(5, &[(0, 1), (1, 0), (1, 2), (3, 0), (3, 4), (4, 1)])
    }

    #[test]
    fn five_process_sccs_match_brute_force() {
        let g = five_process_graph();
        let got: Vec<Vec<ProcessId>> = scc_decompose(&g)
            .into_iter()
            .map(|c| c.members().to_vec())
            .collect();
        assert_eq!(got, brute_sccs(&g));
        assert_eq!(
            got,
            vec![vec![pid(0), pid(1)], vec![pid(2)], vec![pid(3)], vec![pid(4)]]
        );
    }

    #[test]
    fn empty_graph_has_singleton_sccs_and_roots() {
        let g = RoundGraph::empty(3).unwrap();
        assert_eq!(scc_decompose(&g).len(), 3);
        let roots = root_components(&g);
        assert_eq!(roots.roots.len(), 3);
        assert!(!roots.is_single);
    }

    #[test]
    fn three_cycle_is_one_scc() {
        let g = graph(3, &[(0, 1), (1, 2), (2, 0)]);
        let sccs = scc_decompose(&g);
        assert_eq!(sccs.len(), 1);
        assert_eq!(sccs[0].members(), &[pid(0), pid(1), pid(2)]);
    }

    #[test]
    fn five_process_graph_single_root_is_3() {
        let roots = root_components(&five_process_graph());
        assert!(roots.is_single);
        assert_eq!(roots.single().unwrap().members(), &[pid(3)]);
    }

    #[test]
    fn two_cycles_feeding_a_sink_give_two_roots() {
        let g = graph(5, &[(0, 1), (1, 0), (2, 3), (3, 2), (0, 4), (2, 4)]);
        let roots = root_components(&g);
        assert_eq!(roots.roots.len(), 2);
        assert_eq!(roots.roots[0].members(), &[pid(0), pid(1)]);
        assert_eq!(roots.roots[1].members(), &[pid(2), pid(3)]);
    }

    #[test]
    fn rejects_malformed_edges() {
        assert!(matches!(
            RoundGraph::new(2, [(pid(0), pid(0))]),
            Err(GraphError::SelfLoop(_))
        ));
        assert!(matches!(
            RoundGraph::new(2, [(pid(0), pid(2))]),
            Err(GraphError::EndpointOutOfRange { .. })
        ));
        assert!(matches!(
            RoundGraph::new(2, [(pid(0), pid(1)), (pid(0), pid(1))]),
            Err(GraphError::DuplicateEdge { .. })
        ));
    }

    #[test]
    fn exact_scc_membership() {
        let g = five_process_graph();
        assert!(is_exact_scc(&g, &[pid(0), pid(1)].into_iter().collect()));
        assert!(!is_exact_scc(&g, &[pid(0), pid(1), pid(4)].into_iter().collect()));
        assert!(!is_exact_scc(&g, &[pid(0)].into_iter().collect()));
    }
}
