//! Why the assumptions are needed: two roots break agreement, and a stable
//! window that only fits one flood is not enough to decide.
//!
//!     cargo run --example counterexamples

use dyncons::adversary::{short_window, two_roots};
use dyncons::graph_core::find_short_window;
use dyncons::harness::{check_agreement, check_termination_bound, run, RunOptions};

fn main() {
    let s = two_roots(3, 3, 40).unwrap();
    let t = run(&s, &RunOptions::default()).unwrap();
    println!("two roots: {}", check_agreement(&t));

    for extended in [false, true] {
        let s = short_window(2, 7, 3, 40, extended).unwrap();
        let t = run(&s, &RunOptions::default()).unwrap();
        println!(
            "{}: short window at {:?}, decided {}/{}, {}",
            s.meta.generator,
            find_short_window(&s.rounds, s.d).unwrap(),
            t.decisions().len(),
            s.n(),
            check_termination_bound(&t, &s)
        );
    }
}
