//! Random regular graphs as stand-ins for explicit expanders.
//!
//! Each round is the union of a `d`-regular graph on the root set `R` and
//! one on all processes, both bidirected, with every edge entering `R` from
//! outside removed. `R` is then the only root as long as both parts are
//! connected, which the generator checks round by round.

use std::collections::BTreeSet;

use rand::seq::{index, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::generators::{distinct_inputs, meta, rng_for};
use super::{AdversaryError, AssumptionTag, Scenario};
use crate::graph_core::{
    root_components, GraphSequence, Interval, ProcessId, Round, RoundGraph, RoundProfile,
};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpanderConfig {
    pub n: usize,
    pub root_size: usize,
    pub degree: usize,
    /// Smallest acceptable sampled expansion ratio.
    pub alpha_target: f64,
    /// Draw a fresh topology every round.
    pub reshuffle: bool,
}

impl ExpanderConfig {
    fn validate(&self) -> Result<(), AdversaryError> {
        if self.degree < 3 {
            return Err(AdversaryError::infeasible(format!("degree {} < 3", self.degree)));
        }
        if self.root_size == 0 || self.root_size > self.n {
            return Err(AdversaryError::infeasible(format!(
                "root size {} outside [1, {}]",
                self.root_size, self.n
            )));
        }
        if self.n <= self.degree || self.n * self.degree % 2 == 1 {
            return Err(AdversaryError::infeasible(format!(
                "no {}-regular graph on {} vertices",
                self.degree, self.n
            )));
        }
        Ok(())
    }
}

const PAIRING_ATTEMPTS: usize = 10_000;
const ROUND_ATTEMPTS: usize = 100;
const EXPANSION_SAMPLES: usize = 200;

/// Undirected edges `(a, b)`, `a < b`, of a uniformly random simple
/// `d`-regular graph on `m` vertices by the pairing model. Falls back to the
/// complete graph when `m <= d`.
pub fn random_regular(
    rng: &mut ChaCha8Rng,
    m: usize,
    d: usize,
) -> Result<Vec<(usize, usize)>, AdversaryError> {
    if m <= d {
        return Ok((0..m).flat_map(|a| (a + 1..m).map(move |b| (a, b))).collect());
    }
    if m * d % 2 == 1 {
        return Err(AdversaryError::infeasible(format!("no {d}-regular graph on {m} vertices")));
    }
    let mut points: Vec<usize> = (0..m * d).map(|i| i / d).collect();
    'attempt: for _ in 0..PAIRING_ATTEMPTS {
        points.shuffle(rng);
        let mut edges = BTreeSet::new();
        for pair in points.chunks(2) {
            let (a, b) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if a == b || !edges.insert((a, b)) {
                continue 'attempt;
            }
        }
        return Ok(edges.into_iter().collect());
    }
    Err(AdversaryError::infeasible(format!(
        "pairing model found no simple {d}-regular graph on {m} vertices"
    )))
}

fn expander_round(
    rng: &mut ChaCha8Rng,
    n: usize,
    root: &[usize],
    degree: usize,
) -> Result<RoundGraph, AdversaryError> {
    let in_root = |v: usize| root.binary_search(&v).is_ok();
    let want: BTreeSet<ProcessId> = root.iter().map(|&v| ProcessId::from(v)).collect();
    for _ in 0..ROUND_ATTEMPTS {
        let mut pairs = Vec::new();
        for (a, b) in random_regular(rng, root.len(), degree)? {
            pairs.push((root[a], root[b]));
            pairs.push((root[b], root[a]));
        }
        for (a, b) in random_regular(rng, n, degree)? {
            pairs.push((a, b));
            pairs.push((b, a));
        }
        pairs.retain(|&(a, b)| !in_root(b) || in_root(a));
        let g = RoundGraph::from_pairs(n, pairs);
        if root_components(&g).single().map(|c| c.to_set()) == Some(want.clone()) {
            return Ok(g);
        }
    }
    Err(AdversaryError::infeasible("could not draw a round rooted exactly at R"))
}

/// Smallest `|N+(S)| / |S|` over random sets `S` with `R ⊆ S` and
/// `|S| <= n/2`, where `N+(S)` are the processes outside `S` hearing from
/// `S`. `None` when no such set exists.
pub fn sampled_expansion(
    g: &RoundGraph,
    root: &[usize],
    samples: usize,
    rng: &mut impl Rng,
) -> Option<f64> {
    let n = g.n();
    if root.len() > n / 2 {
        return None;
    }
    let others: Vec<usize> = (0..n).filter(|v| !root.contains(v)).collect();
    let mut worst: Option<f64> = None;
    for _ in 0..samples {
        let extra = rng.gen_range(0..=n / 2 - root.len());
        let mut s: BTreeSet<usize> = root.iter().copied().collect();
        s.extend(index::sample(rng, others.len(), extra).into_iter().map(|i| others[i]));
        let boundary: BTreeSet<usize> = s
            .iter()
            .flat_map(|&u| g.out_neighbors(ProcessId::from(u)).iter().map(|q| q.index()))
            .filter(|v| !s.contains(v))
            .collect();
        let ratio = boundary.len() as f64 / s.len() as f64;
        worst = Some(worst.map_or(ratio, |w: f64| w.min(ratio)));
    }
    worst
}

/// An expander-rooted sequence. `D` is set to the measured network causal
/// diameter of `[1, T]`.
pub fn expander(cfg: ExpanderConfig, seed: u64, horizon: Round) -> Result<Scenario, AdversaryError> {
    cfg.validate()?;
    if horizon == 0 {
        return Err(AdversaryError::infeasible("horizon must be positive"));
    }
    let mut rng = rng_for(seed);
    let mut root = index::sample(&mut rng, cfg.n, cfg.root_size).into_vec();
    root.sort_unstable();
    let mut rounds = Vec::with_capacity(horizon as usize);
    if cfg.reshuffle {
        for _ in 0..horizon {
            rounds.push(expander_round(&mut rng, cfg.n, &root, cfg.degree)?);
        }
    } else {
        let g = expander_round(&mut rng, cfg.n, &root, cfg.degree)?;
        rounds.resize(horizon as usize, g);
    }
    for (i, g) in rounds.iter().enumerate() {
        if let Some(alpha) = sampled_expansion(g, &root, EXPANSION_SAMPLES, &mut rng) {
            if alpha <= 0.0 || alpha < cfg.alpha_target {
                return Err(AdversaryError::infeasible(format!(
                    "round {} expands by only {alpha:.3}",
                    i + 1
                )));
            }
        }
    }
    let seq = GraphSequence::new(cfg.n, rounds).map_err(AdversaryError::infeasible)?;
    let profile = RoundProfile::compute(&seq);
    let d = profile
        .network_interval_diameter(Interval::new(1, horizon))
        .map_err(AdversaryError::infeasible)?
        .finite()
        .ok_or_else(|| AdversaryError::infeasible("no flood completes within the horizon"))?;
    let mut s = Scenario::new(
        d,
        distinct_inputs(cfg.n),
        seq,
        meta("expander", seed, AssumptionTag::Assumption2, None),
    )?;
    s.meta.claimed_r_st = s.classify().report.r_st;
    Ok(s)
}
