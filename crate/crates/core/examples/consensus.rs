//! One simulated run on a generated stable-window scenario, printing every
//! lock, unlock and decision.
//!
//!     cargo run --example consensus -- [seed]

use dyncons::adversary::{stable_window, StableWindowConfig};
use dyncons::harness::{check_all, run, RunOptions};

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let s = stable_window(StableWindowConfig::minimal(seed, 6, 3, 4)).unwrap();
    let class = s.classify();
    println!(
        "n={} D={} horizon={} r_ST={:?} bound={:?}",
        s.n(),
        s.d,
        s.horizon(),
        class.report.r_st,
        class.report.termination_bound()
    );

    let trace = run(&s, &RunOptions::default()).unwrap();
    for rec in &trace.rounds {
        for e in &rec.events {
            println!("round {:>2}  process {}  {:?}", rec.round, e.process, e.event);
        }
    }
    for v in check_all(&trace, &s) {
        println!("{v}");
    }
}
