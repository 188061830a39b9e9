//! Ground-truth oracle on a small hand-built sequence: roots, causal
//! distances, interval diameters and the stability window.
//!
//!     cargo run --example oracle

use dyncons::graph_core::{
    causal_distance, find_r_st, network_causal_diameter, root_components, scc_decompose, GraphSequence,
    Interval, ProcessId, RoundGraph,
};

fn ring(n: u32) -> Vec<(ProcessId, ProcessId)> {
    (0..n).map(|i| (ProcessId(i), ProcessId((i + 1) % n))).collect()
}

fn main() {
    // rounds 1-2 are a star from 0, then process 4 listens to a 4-ring for 22 rounds
    let star: Vec<_> = (1..5).map(|i| (ProcessId(0), ProcessId(i))).collect();
    let mut with_tail = ring(4);
    with_tail.push((ProcessId(3), ProcessId(4)));
    let mut rounds = vec![RoundGraph::new(5, star).unwrap(); 2];
    rounds.extend(std::iter::repeat_n(RoundGraph::new(5, with_tail).unwrap(), 22));
    let seq = GraphSequence::new(5, rounds).unwrap();

    let g = seq.graph(3).unwrap();
    println!("round 3 SCCs: {:?}", scc_decompose(g).iter().map(|c| c.members().to_vec()).collect::<Vec<_>>());
    println!("round 3 roots: {:?}", root_components(g).single().map(|c| c.members().to_vec()));

    for r in [1, 3, 23] {
        let d = causal_distance(&seq, r, ProcessId(0), ProcessId(4)).unwrap();
        println!("cd_{r}(0,4) = {d}");
    }
    let iv = Interval::new(3, 24);
    println!("D^[3,24] = {}", network_causal_diameter(&seq, iv).unwrap());

    for d in [2, 4] {
        let report = find_r_st(&seq, d).unwrap();
        match report.r_st {
            Some(r) => println!("D={d}: r_ST={r}, everyone decides by round {}", report.termination_bound().unwrap()),
            None => println!("D={d}: no window of length 4D+2"),
        }
    }
}
