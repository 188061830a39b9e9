//! Seeded constructions of single-root (and deliberately broken) sequences.
//!
//! The D-bounded rounds all come from one layered shape: a root of `k`
//! processes joined by a random Hamiltonian cycle, and the remaining
//! processes on levels `1..=L` with `k - 1 + L <= D`, each taking a random
//! parent one level up every round. A flood started anywhere in the root
//! covers the root within `k - 1` rounds and then one level per round.
//! Extra edges never enter the root and never skip a level downwards, so
//! they cannot create a second root or shortcut the level structure.

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AdversaryError, AssumptionTag, Scenario, ScenarioMeta};
use crate::consensus::{UnlockRule, Value};
use crate::graph_core::{
    find_short_window, root_components, GraphSequence, Round, RoundGraph,
};

pub(crate) fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub(crate) fn meta(generator: &str, seed: u64, tag: AssumptionTag, r_st: Option<Round>) -> ScenarioMeta {
    ScenarioMeta {
        generator: generator.to_string(),
        seed,
        assumption: tag,
        claimed_r_st: r_st,
        unlock_rule: UnlockRule::default(),
    }
}

pub(crate) fn distinct_inputs(n: usize) -> Vec<Value> {
    (0..n as i64).map(Value).collect()
}

fn check_n_d(n: usize, d: u32) -> Result<(), AdversaryError> {
    if n < 2 {
        return Err(AdversaryError::infeasible(format!("n = {n}, need at least 2 processes")));
    }
    if d == 0 || d as usize > n - 1 {
        return Err(AdversaryError::infeasible(format!("D = {d} outside [1, n-1] for n = {n}")));
    }
    Ok(())
}

fn sequence(n: usize, rounds: Vec<RoundGraph>) -> Result<GraphSequence, AdversaryError> {
    GraphSequence::new(n, rounds).map_err(AdversaryError::infeasible)
}

#[derive(Clone, Debug)]
struct Layout {
    root: Vec<usize>,
    level: Vec<usize>,
    by_level: Vec<Vec<usize>>,
}

impl Layout {
    fn from_levels(root: Vec<usize>, level: Vec<usize>) -> Self {
        let depth = level.iter().copied().max().unwrap_or(0);
        let mut by_level = vec![Vec::new(); depth + 1];
        for (v, &l) in level.iter().enumerate() {
            by_level[l].push(v);
        }
        Layout {
            root,
            level,
            by_level,
        }
    }

    /// Puts everybody outside `root` on `1..=L` levels, `L` random but at
    /// most `D - |root| + 1`.
    fn random(rng: &mut ChaCha8Rng, n: usize, d: u32, root: Vec<usize>) -> Self {
        let mut others: Vec<usize> = (0..n).filter(|v| !root.contains(v)).collect();
        others.shuffle(rng);
        let mut level = vec![0; n];
        if !others.is_empty() {
            let max_levels = (d as usize + 1 - root.len()).min(others.len());
            let levels = rng.gen_range(1..=max_levels);
            for (i, &v) in others.iter().enumerate() {
                level[v] = if i < levels { i + 1 } else { rng.gen_range(1..=levels) };
            }
        }
        Self::from_levels(root, level)
    }

    fn in_root(&self, v: usize) -> bool {
        self.level[v] == 0
    }

    fn round(&self, rng: &mut ChaCha8Rng, extras: bool) -> RoundGraph {
        let n = self.level.len();
        let mut pairs = Vec::new();
        let mut cyc = self.root.clone();
        cyc.shuffle(rng);
        let k = cyc.len();
        if k >= 2 {
            pairs.extend((0..k).map(|i| (cyc[i], cyc[(i + 1) % k])));
            for _ in 0..rng.gen_range(0..=k) {
                pairs.push((*cyc.choose(rng).unwrap(), *cyc.choose(rng).unwrap()));
            }
        }
        for l in 1..self.by_level.len() {
            for &v in &self.by_level[l] {
                pairs.push((*self.by_level[l - 1].choose(rng).unwrap(), v));
            }
        }
        if extras {
            for _ in 0..rng.gen_range(0..=n) {
                let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
                if !self.in_root(v) && self.level[v] <= self.level[u] + 1 {
                    pairs.push((u, v));
                }
            }
        }
        RoundGraph::from_pairs(n, pairs)
    }
}

/// A random root of size `1..=min(D, n-1)` different from every forbidden set.
fn random_root(rng: &mut ChaCha8Rng, n: usize, d: u32, forbidden: &[&[usize]]) -> Vec<usize> {
    let kmax = (d as usize).min(n - 1);
    loop {
        let k = rng.gen_range(1..=kmax);
        let mut root = index::sample(rng, n, k).into_vec();
        root.sort_unstable();
        if !forbidden.contains(&root.as_slice()) {
            return root;
        }
    }
}

/// Fills `count` rounds with stable segments of length `1..=max_len`, each
/// rooted differently from its neighbours.
#[allow(clippy::too_many_arguments)]
fn churn_segments(
    rng: &mut ChaCha8Rng,
    n: usize,
    d: u32,
    count: usize,
    max_len: usize,
    prev: Option<Vec<usize>>,
    next: Option<&[usize]>,
    out: &mut Vec<RoundGraph>,
) {
    let mut prev = prev;
    let mut left = count;
    while left > 0 {
        let len = rng.gen_range(1..=max_len).min(left);
        let mut forbidden: Vec<&[usize]> = Vec::new();
        if let Some(p) = &prev {
            forbidden.push(p);
        }
        if len == left {
            forbidden.extend(next);
        }
        let root = random_root(rng, n, d, &forbidden);
        let layout = Layout::random(rng, n, d, root.clone());
        for _ in 0..len {
            out.push(layout.round(rng, true));
        }
        prev = Some(root);
        left -= len;
    }
}

fn expect_tag(s: &Scenario, want: impl Fn(&AssumptionTag) -> bool) -> Result<(), AdversaryError> {
    let c = s.classify();
    if want(&c.tag) {
        Ok(())
    } else {
        Err(AdversaryError::infeasible(format!(
            "{} output rejected by the oracle: {}",
            s.meta.generator, c.tag
        )))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StableWindowConfig {
    pub seed: u64,
    pub n: usize,
    pub d: u32,
    pub r_st: Round,
    pub window_len: Round,
    pub horizon: Round,
    /// Re-randomize the topology inside the window every round.
    pub churn: bool,
}

impl StableWindowConfig {
    /// Window of exactly `4D+2` rounds followed by `D` more.
    pub fn minimal(seed: u64, n: usize, d: u32, r_st: Round) -> Self {
        let window_len = 4 * d + 2;
        StableWindowConfig {
            seed,
            n,
            d,
            r_st,
            window_len,
            horizon: r_st + window_len - 1 + d,
            churn: true,
        }
    }
}

/// Churning single-root rounds around a window `[r_ST, r_ST + window_len - 1]`
/// whose root is frozen and D-bounded.
pub fn stable_window(cfg: StableWindowConfig) -> Result<Scenario, AdversaryError> {
    let StableWindowConfig {
        seed,
        n,
        d,
        r_st,
        window_len,
        horizon,
        churn,
    } = cfg;
    check_n_d(n, d)?;
    if r_st == 0 {
        return Err(AdversaryError::infeasible("r_ST must be at least 1"));
    }
    if window_len < 4 * d + 2 {
        return Err(AdversaryError::infeasible(format!(
            "window of {window_len} rounds is shorter than 4D+2 = {}",
            4 * d + 2
        )));
    }
    if horizon < r_st + window_len - 1 {
        return Err(AdversaryError::infeasible(format!(
            "horizon {horizon} ends before the window [{r_st}, {}]",
            r_st + window_len - 1
        )));
    }
    let mut rng = rng_for(seed);
    let max_len = 4 * d as usize + 1;
    let root = random_root(&mut rng, n, d, &[]);
    let layout = Layout::random(&mut rng, n, d, root.clone());
    let mut rounds = Vec::with_capacity(horizon as usize);
    churn_segments(&mut rng, n, d, r_st as usize - 1, max_len, None, Some(&root), &mut rounds);
    if churn {
        for _ in 0..window_len {
            rounds.push(layout.round(&mut rng, true));
        }
    } else {
        let g = layout.round(&mut rng, true);
        rounds.extend(std::iter::repeat_n(g, window_len as usize));
    }
    let tail = (horizon + 1 - r_st - window_len) as usize;
    churn_segments(&mut rng, n, d, tail, max_len, Some(root), None, &mut rounds);
    let s = Scenario::new(
        d,
        distinct_inputs(n),
        sequence(n, rounds)?,
        meta("stable_window", seed, AssumptionTag::Assumption1, Some(r_st)),
    )?;
    let c = s.classify();
    if c.tag != AssumptionTag::Assumption1 || c.report.r_st != Some(r_st) {
        return Err(AdversaryError::infeasible(format!(
            "stable_window output rejected by the oracle: {} with r_ST = {:?}",
            c.tag, c.report.r_st
        )));
    }
    Ok(s)
}

/// Single-root, D-bounded rounds whose roots never stay put for `4D+2` rounds.
pub fn churn(seed: u64, n: usize, d: u32, horizon: Round) -> Result<Scenario, AdversaryError> {
    check_n_d(n, d)?;
    let mut rng = rng_for(seed);
    let mut rounds = Vec::with_capacity(horizon as usize);
    churn_segments(&mut rng, n, d, horizon as usize, 4 * d as usize + 1, None, None, &mut rounds);
    let tag = AssumptionTag::violation("no_stable_window");
    let s = Scenario::new(d, distinct_inputs(n), sequence(n, rounds)?, meta("churn", seed, tag.clone(), None))?;
    expect_tag(&s, |t| *t == tag)?;
    Ok(s)
}

/// Uniformly random edges each round, patched to a single root by linking
/// the first root component to all others. No D-boundedness is enforced.
pub fn random_single_root(
    seed: u64,
    n: usize,
    d: u32,
    horizon: Round,
) -> Result<Scenario, AdversaryError> {
    check_n_d(n, d)?;
    let mut rng = rng_for(seed);
    let mut rounds = Vec::with_capacity(horizon as usize);
    for _ in 0..horizon {
        let p: f64 = rng.gen_range(0.05..0.6);
        let mut pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .filter(|(a, b)| a != b)
            .filter(|_| rng.gen_bool(p))
            .collect();
        let g = RoundGraph::from_pairs(n, pairs.iter().copied());
        let roots = root_components(&g).roots;
        let src = roots[0].members()[0].index();
        for other in &roots[1..] {
            pairs.push((src, other.members()[0].index()));
        }
        rounds.push(RoundGraph::from_pairs(n, pairs));
    }
    let seq = sequence(n, rounds)?;
    let mut s = Scenario::new(
        d,
        distinct_inputs(n),
        seq,
        meta("random_single_root", seed, AssumptionTag::Assumption1, None),
    )?;
    let c = s.classify();
    if !c.report.multi_root_rounds.is_empty() {
        return Err(AdversaryError::infeasible("random_single_root produced two roots"));
    }
    s.meta.claimed_r_st = c.report.r_st;
    s.meta.assumption = c.tag;
    Ok(s)
}

fn fixed(generator: &str, d: u32, inputs: Vec<Value>, seq: GraphSequence) -> Result<Scenario, AdversaryError> {
    let mut s = Scenario::new(d, inputs, seq, meta(generator, 0, AssumptionTag::Assumption1, None))?;
    let c = s.classify();
    s.meta.claimed_r_st = c.report.r_st;
    s.meta.assumption = c.tag;
    Ok(s)
}

fn check_static(n: usize, horizon: Round) -> Result<(), AdversaryError> {
    if n < 2 || horizon == 0 {
        return Err(AdversaryError::infeasible("need n >= 2 and a positive horizon"));
    }
    Ok(())
}

/// `0 -> 1 -> ... -> n-1` in every round, with `D = n - 1`.
pub fn static_line(n: usize, horizon: Round) -> Result<Scenario, AdversaryError> {
    check_static(n, horizon)?;
    let g = RoundGraph::from_pairs(n, (0..n - 1).map(|i| (i, i + 1)));
    fixed("static_line", n as u32 - 1, distinct_inputs(n), sequence(n, vec![g; horizon as usize])?)
}

/// Process 0 sends to everybody in every round, with `D = n - 1`.
pub fn static_star(n: usize, horizon: Round) -> Result<Scenario, AdversaryError> {
    check_static(n, horizon)?;
    let g = RoundGraph::from_pairs(n, (1..n).map(|i| (0, i)));
    fixed("static_star", n as u32 - 1, distinct_inputs(n), sequence(n, vec![g; horizon as usize])?)
}

/// The static line up to round `kappa`, reversed from then on.
pub fn reversing_line(n: usize, kappa: Round, horizon: Round) -> Result<Scenario, AdversaryError> {
    check_static(n, horizon)?;
    let forward = RoundGraph::from_pairs(n, (0..n - 1).map(|i| (i, i + 1)));
    let backward = RoundGraph::from_pairs(n, (0..n - 1).map(|i| (i + 1, i)));
    let rounds = (1..=horizon)
        .map(|r| if r <= kappa { forward.clone() } else { backward.clone() })
        .collect();
    fixed("reversing_line", n as u32 - 1, distinct_inputs(n), sequence(n, rounds)?)
}

/// Two disjoint strongly connected roots `C0` (inputs 0) and `C1` (inputs 1)
/// that both feed a single process `C2` (input 0).
pub fn two_roots(n0: usize, n1: usize, horizon: Round) -> Result<Scenario, AdversaryError> {
    if n0 == 0 || n1 == 0 || horizon == 0 {
        return Err(AdversaryError::infeasible("need n0, n1 >= 1 and a positive horizon"));
    }
    let n = n0 + n1 + 1;
    let c2 = n - 1;
    let ring = |start: usize, len: usize| (0..len).map(move |i| (start + i, start + (i + 1) % len));
    let g = RoundGraph::from_pairs(
        n,
        ring(0, n0).chain(ring(n0, n1)).chain([(0, c2), (n0, c2)]),
    );
    let inputs = (0..n).map(|v| Value(i64::from(n0 <= v && v < c2))).collect();
    let tag = AssumptionTag::violation("two_roots");
    let s = Scenario::new(
        n as u32 - 1,
        inputs,
        sequence(n, vec![g; horizon as usize])?,
        meta("two_roots", 0, tag, None),
    )?;
    expect_tag(&s, |t| *t == AssumptionTag::violation("multiple_roots"))?;
    Ok(s)
}

/// Four processes: the complete graph in round 1, then a fixed directed
/// ring in rounds 2 and 3. `D = 1`.
pub fn complete_then_rings() -> Result<Scenario, AdversaryError> {
    let n = 4;
    let complete = RoundGraph::from_pairs(n, (0..n).flat_map(|a| (0..n).map(move |b| (a, b))));
    let ring = RoundGraph::from_pairs(n, (0..n).map(|i| (i, (i + 1) % n)));
    fixed(
        "complete_then_rings",
        1,
        distinct_inputs(n),
        sequence(n, vec![complete, ring.clone(), ring])?,
    )
}

/// A window of `D` rounds (or `D + 1` when `extended`) rooted at a single
/// process `a`, with one process `q` on level `D` so that every flood from
/// the root needs `D` rounds to reach it. The window ends `D - 1` rounds
/// before the horizon; those rounds are rooted at `q`, which hears nobody.
/// The prefix churns with segments of at most `D` rounds.
pub fn short_window(
    seed: u64,
    n: usize,
    d: u32,
    horizon: Round,
    extended: bool,
) -> Result<Scenario, AdversaryError> {
    check_n_d(n, d)?;
    let w = d + u32::from(extended);
    if horizon < w + d - 1 {
        return Err(AdversaryError::infeasible(format!(
            "horizon {horizon} cannot hold a {w}-round window and a {}-round tail",
            d - 1
        )));
    }
    let start = horizon - w - d + 2;
    let mut rng = rng_for(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let (a, q) = (perm[0], perm[1]);
    let du = d as usize;
    let inner = du.saturating_sub(1).max(1);
    let mut level = vec![0; n];
    level[q] = du;
    for (i, &v) in perm[2..].iter().enumerate() {
        level[v] = if i < du - 1 { i + 1 } else { rng.gen_range(1..=inner) };
    }
    let window = Layout::from_levels(vec![a], level);
    let tail = Layout::random(&mut rng, n, d, vec![q]);

    let mut rounds = Vec::with_capacity(horizon as usize);
    churn_segments(&mut rng, n, d, start as usize - 1, du, None, Some(&[a]), &mut rounds);
    for _ in 0..w {
        rounds.push(window.round(&mut rng, true));
    }
    for _ in 1..d {
        rounds.push(tail.round(&mut rng, true));
    }
    let name = if extended { "short_window_extended" } else { "short_window" };
    let s = Scenario::new(
        d,
        distinct_inputs(n),
        sequence(n, rounds)?,
        meta(name, seed, AssumptionTag::violation("short_window"), None),
    )?;
    expect_tag(&s, |t| t.is_violation())?;
    let found = find_short_window(&s.rounds, d).expect("D >= 1");
    let want = extended.then_some(start);
    if found != want {
        return Err(AdversaryError::infeasible(format!(
            "{name} output rejected by the oracle: short window at {found:?}, expected {want:?}"
        )));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_core::{
        causal_distance, check_root_d_bounded, network_causal_diameter, vertex_stable_intervals,
        CausalDistance, Interval, ProcessId, RoundProfile,
    };
    use std::collections::BTreeSet;

    fn set(ids: &[u32]) -> BTreeSet<ProcessId> {
        ids.iter().map(|&i| ProcessId(i)).collect()
    }

    #[test]
    fn stable_window_example() {
        let cfg = StableWindowConfig {
            seed: 1,
            n: 8,
            d: 7,
            r_st: 5,
            window_len: 30,
            horizon: 60,
            churn: true,
        };
        let s = stable_window(cfg).unwrap();
        let c = s.classify();
        assert_eq!(c.tag, AssumptionTag::Assumption1);
        assert!(c.report.r_st.unwrap() <= 5);
        assert_eq!(s.meta.claimed_r_st, Some(5));
    }

    #[test]
    fn stable_window_whole_horizon_static() {
        let cfg = StableWindowConfig {
            seed: 3,
            n: 5,
            d: 3,
            r_st: 1,
            window_len: 20,
            horizon: 20,
            churn: false,
        };
        let s = stable_window(cfg).unwrap();
        let iv = vertex_stable_intervals(&s.rounds);
        assert_eq!(iv.intervals.len(), 1);
        assert_eq!(iv.intervals[0].interval, Interval::new(1, 20));
    }

    #[test]
    fn stable_window_rejects_bad_parameters() {
        let base = StableWindowConfig::minimal(0, 6, 2, 4);
        for cfg in [
            StableWindowConfig { d: 6, ..base },
            StableWindowConfig { d: 0, ..base },
            StableWindowConfig { window_len: 9, ..base },
            StableWindowConfig { horizon: 10, ..base },
            StableWindowConfig { r_st: 0, ..base },
            StableWindowConfig { n: 1, ..base },
        ] {
            assert!(matches!(stable_window(cfg), Err(AdversaryError::Infeasible(_))), "{cfg:?}");
        }
    }

    #[test]
    fn same_seed_same_file() {
        let cfg = StableWindowConfig::minimal(42, 9, 4, 7);
        assert_eq!(stable_window(cfg).unwrap().to_json(), stable_window(cfg).unwrap().to_json());
        let other = StableWindowConfig { seed: 43, ..cfg };
        assert_ne!(stable_window(cfg).unwrap().to_json(), stable_window(other).unwrap().to_json());
    }

    #[test]
    fn stable_window_batch_validates() {
        for seed in 0..40 {
            let n = 3 + (seed as usize % 10);
            let d = 2 + (seed as u32 % (n as u32 - 2));
            let cfg = StableWindowConfig::minimal(seed, n, d, 1 + seed as u32 % 13);
            stable_window(cfg).unwrap();
        }
    }

    #[test]
    fn single_edge_is_two_bounded() {
        let g = RoundGraph::from_pairs(2, [(0, 1)]);
        let seq = GraphSequence::repeat(g, 6).unwrap();
        assert_eq!(RoundProfile::compute(&seq).single_root(1), Some(set(&[0])));
        assert!(check_root_d_bounded(&seq, Interval::new(1, 6), 2).unwrap());
    }

    #[test]
    fn churn_has_single_roots_and_no_window() {
        for seed in 0..20 {
            let s = churn(seed, 7, 3, 80).unwrap();
            let c = s.classify();
            assert!(c.report.safety_clauses_hold());
            assert_eq!(c.report.r_st, None);
        }
    }

    #[test]
    fn random_single_root_has_one_root_per_round() {
        for seed in 0..20 {
            let s = random_single_root(seed, 5, 3, 30).unwrap();
            assert!(s.classify().report.multi_root_rounds.is_empty());
        }
    }

    #[test]
    fn static_line_root() {
        let s = static_line(5, 10).unwrap();
        let p = RoundProfile::compute(&s.rounds);
        for r in 1..=10 {
            assert_eq!(p.single_root(r), Some(set(&[0])));
        }
    }

    #[test]
    fn static_star_root_and_diameter() {
        let s = static_star(4, 10).unwrap();
        let p = RoundProfile::compute(&s.rounds);
        assert_eq!(p.single_root(1), Some(set(&[0])));
        assert_eq!(
            network_causal_diameter(&s.rounds, Interval::new(1, 10)).unwrap(),
            CausalDistance::Finite(1)
        );
    }

    #[test]
    fn reversing_line_switches_root() {
        let s = reversing_line(5, 3, 20).unwrap();
        let iv = vertex_stable_intervals(&s.rounds);
        let got: Vec<_> = iv.intervals.iter().map(|r| (r.interval, r.vertex_set.clone())).collect();
        assert_eq!(
            got,
            vec![(Interval::new(1, 3), set(&[0])), (Interval::new(4, 20), set(&[4]))]
        );
    }

    #[test]
    fn two_roots_shape() {
        let s = two_roots(2, 2, 60).unwrap();
        assert_eq!(s.meta.assumption.to_string(), "VIOLATION(two_roots)");
        let c = s.classify();
        assert_eq!(c.report.multi_root_rounds.len(), 60);
        assert_eq!(c.report.r_st, None);
        let roots = root_components(s.rounds.graph(1).unwrap());
        assert_eq!(roots.roots.len(), 2);
        let inputs: Vec<i64> = s.inputs.iter().map(|v| v.0).collect();
        assert_eq!(inputs, vec![0, 0, 1, 1, 0]);
    }

    #[test]
    fn complete_then_rings_shape() {
        let s = complete_then_rings().unwrap();
        assert_eq!((s.n(), s.horizon(), s.d), (4, 3, 1));
        assert_eq!(s.rounds.graph(1).unwrap().edge_count(), 12);
        assert_eq!(s.rounds.graph(2).unwrap(), s.rounds.graph(3).unwrap());
    }

    fn window_of(s: &Scenario, r: Round) -> (Interval, BTreeSet<ProcessId>) {
        RoundProfile::compute(&s.rounds)
            .maximal_root_intervals()
            .into_iter()
            .find(|(iv, _)| iv.contains(r))
            .unwrap()
    }

    #[test]
    fn short_window_keeps_q_far() {
        for seed in 0..10 {
            let (n, d, t) = (7, 4, 40);
            let s = short_window(seed, n, d, t, false).unwrap();
            let start = t - 2 * d + 2;
            let (iv, root) = window_of(&s, start);
            assert_eq!(iv, Interval::new(start, start + d - 1));
            let a = *root.iter().next().unwrap();
            let tail_root = RoundProfile::compute(&s.rounds).single_root(t).unwrap();
            let q = *tail_root.iter().next().unwrap();
            for r in iv.rounds() {
                let cd = causal_distance(&s.rounds, r, a, q).unwrap();
                assert!(cd >= CausalDistance::Finite(d), "seed {seed} round {r}: {cd}");
            }
            assert_eq!(s.classify().report.r_st, None);
        }
    }

    #[test]
    fn extending_the_short_window_flips_the_search() {
        for seed in 0..10 {
            let base = short_window(seed, 6, 3, 30, false).unwrap();
            let ext = short_window(seed, 6, 3, 30, true).unwrap();
            assert_eq!(find_short_window(&base.rounds, 3).unwrap(), None);
            assert_eq!(find_short_window(&ext.rounds, 3).unwrap(), Some(30 - 3 - 4 + 2));
        }
    }

    #[test]
    fn short_window_with_d_one() {
        let s = short_window(5, 4, 1, 10, false).unwrap();
        assert_eq!(s.horizon(), 10);
        short_window(5, 4, 1, 10, true).unwrap();
    }
}
