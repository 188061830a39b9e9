//! Builders and slow reference implementations shared by the integration tests.
#![allow(dead_code)]

use dyncons::graph_core::{GraphSequence, ProcessId, Round, RoundGraph};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Every round an independent random digraph with edge probability `p`.
pub fn random_sequence(rng: &mut ChaCha8Rng, n: usize, horizon: usize, p: f64) -> GraphSequence {
    let rounds = (0..horizon)
        .map(|_| {
            let mut edges = Vec::new();
            for a in 0..n as u32 {
                for b in 0..n as u32 {
                    if a != b && rng.gen_bool(p) {
                        edges.push((ProcessId(a), ProcessId(b)));
                    }
                }
            }
            RoundGraph::new(n, edges).unwrap()
        })
        .collect();
    GraphSequence::new(n, rounds).unwrap()
}

/// Processes `0..c` form a strongly connected component in every round
/// (fresh Hamiltonian cycle plus random chords); `extra` more processes only
/// listen to the component and to each other in increasing order.
pub fn stable_scc_sequence(rng: &mut ChaCha8Rng, c: usize, extra: usize, horizon: usize) -> GraphSequence {
    let n = c + extra;
    let rounds = (0..horizon)
        .map(|_| {
            let mut order: Vec<u32> = (0..c as u32).collect();
            order.shuffle(rng);
            let mut edges = Vec::new();
            if c > 1 {
                for i in 0..c {
                    edges.push((ProcessId(order[i]), ProcessId(order[(i + 1) % c])));
                }
            }
            for a in 0..c as u32 {
                for b in 0..c as u32 {
                    if a != b && rng.gen_bool(0.2) {
                        edges.push((ProcessId(a), ProcessId(b)));
                    }
                }
            }
            for v in c..n {
                let from = rng.gen_range(0..v) as u32;
                edges.push((ProcessId(from), ProcessId(v as u32)));
            }
            edges.sort();
            edges.dedup();
            RoundGraph::new(n, edges).unwrap()
        })
        .collect();
    GraphSequence::new(n, rounds).unwrap()
}

/// Shortest chain lengths from `p` starting in round `r`, found by walking
/// every chain explicitly. A step either stays put or follows an edge of the
/// round it is taken in.
pub fn enumerate_chains(seq: &GraphSequence, r: Round, p: ProcessId) -> Vec<Option<u32>> {
    let mut best = vec![None; seq.n()];
    best[p.index()] = Some(1);
    let max_len = seq.horizon() - r + 1;
    walk(seq, r, p, 0, max_len, &mut best);
    best
}

fn walk(seq: &GraphSequence, r: Round, at: ProcessId, len: u32, max_len: u32, best: &mut [Option<u32>]) {
    if len == max_len {
        return;
    }
    let g = seq.graph(r + len).unwrap();
    let mut next: Vec<ProcessId> = g.out_neighbors(at).to_vec();
    next.push(at);
    for q in next {
        let l = len + 1;
        if best[q.index()].is_none_or(|b| l < b) {
            best[q.index()] = Some(l);
        }
        walk(seq, r, q, l, max_len, best);
    }
}
