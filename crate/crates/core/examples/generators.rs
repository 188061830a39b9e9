//! Every scenario generator once, with the oracle's verdict on its output.
//!
//!     cargo run --example generators

use dyncons::adversary::{
    churn, complete_then_rings, random_single_root, reversing_line, short_window, stable_window, static_line,
    static_star, two_roots, Scenario, StableWindowConfig,
};

fn show(s: Scenario) {
    let class = s.classify();
    println!(
        "{:<22} n={:<2} D={:<2} T={:<3} tag={:<32} oracle={:<32} r_ST={:?}",
        s.meta.generator,
        s.n(),
        s.d,
        s.horizon(),
        s.meta.assumption.to_string(),
        class.tag.to_string(),
        class.report.r_st
    );
}

fn main() {
    show(stable_window(StableWindowConfig::minimal(1, 8, 3, 5)).unwrap());
    show(stable_window(StableWindowConfig { churn: false, ..StableWindowConfig::minimal(1, 8, 3, 5) }).unwrap());
    show(churn(1, 6, 2, 40).unwrap());
    show(random_single_root(1, 5, 2, 30).unwrap());
    show(static_line(5, 20).unwrap());
    show(static_star(5, 20).unwrap());
    show(reversing_line(5, 3, 30).unwrap());
    show(two_roots(3, 2, 30).unwrap());
    show(complete_then_rings().unwrap());
    show(short_window(1, 6, 3, 30, false).unwrap());
    show(short_window(1, 6, 3, 30, true).unwrap());

    // scenarios are canonical JSON, one round per line
    let text = static_line(3, 2).unwrap().to_json();
    println!("\n{text}");
}
