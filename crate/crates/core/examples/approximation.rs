//! Network approximation by flooding: each process learns which edges
//! existed in which round and tests for a stable root.
//!
//!     cargo run --example approximation

use dyncons::approximation::ApproxState;
use dyncons::graph_core::{GraphSequence, Interval, ProcessId, RoundGraph};

fn main() {
    // 0 <-> 1 is the root, 2 hears from 1
    let g = RoundGraph::new(3, [(0, 1), (1, 0), (1, 2)].map(|(a, b)| (ProcessId(a), ProcessId(b)))).unwrap();
    let seq = GraphSequence::repeat(g, 6).unwrap();
    let mut states: Vec<ApproxState> = seq.processes().map(ApproxState::new).collect();

    for r in 1..=seq.horizon() {
        let outbox: Vec<_> = states.iter().map(ApproxState::emit).collect();
        let g = seq.graph(r).unwrap();
        for q in seq.processes() {
            let inbox: Vec<_> = g.in_neighbors(q).iter().map(|p| &outbox[p.index()]).collect();
            states[q.index()].absorb(r, &inbox).unwrap();
        }
        let a = &states[0];
        println!(
            "after round {r}: process 0 knows {} labeled edges, C|1 = {:?}, inStableRoot([1,2]) = {}",
            a.edge_count(),
            a.detected_component(1),
            a.in_stable_root(Interval::new(1, 2), r + 1),
        );
    }
    // 2 learns the root's edges but is not part of it
    let a = &states[2];
    println!("process 2: {} labeled edges, C|1 = {:?}, inStableRoot([1,4]) = {}", a.edge_count(), a.detected_component(1), a.in_stable_root(Interval::new(1, 4), 7));
    println!("digest of process 2: {}", &a.digest()[..16]);
}
