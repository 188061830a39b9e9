//! Random 4-regular expander rounds with a fixed root: sampled expansion and
//! the measured network causal diameter as n grows.
//!
//!     cargo run --release --example expander

use dyncons::adversary::{expander, random_regular, sampled_expansion, ExpanderConfig};
use dyncons::graph_core::{ProcessId, RoundGraph, RoundProfile};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let pairs = random_regular(&mut rng, 64, 4).unwrap();
    let both = pairs
        .iter()
        .flat_map(|&(a, b)| [(a, b), (b, a)])
        .map(|(a, b)| (ProcessId(a as u32), ProcessId(b as u32)));
    let g = RoundGraph::new(64, both).unwrap();
    let root: Vec<usize> = (0..8).collect();
    println!("bidirected 4-regular graph, |R|=8: sampled expansion {:?}", sampled_expansion(&g, &root, 200, &mut rng));

    for n in [64, 128, 256] {
        let cfg = ExpanderConfig { n, root_size: n / 8, degree: 4, alpha_target: 0.0, reshuffle: true };
        let s = expander(cfg, 7, 40).unwrap();
        let root = RoundProfile::compute(&s.rounds).single_root(1).unwrap();
        println!("n={n:<4} |R|={:<3} log2 n={:.0}  D^[1,40]={}", root.len(), (n as f64).log2(), s.d);
    }
}
