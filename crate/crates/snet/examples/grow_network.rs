//! Grow a network from the bundled two-color rules and watch its sizes
//! track the spectral predictions.
//!
//! Run with `cargo run --release --example grow_network [steps] [seed]`.

use snet::generator::generate;
use snet::rulesio::{parse_initial_graph, parse_ruleset};
use snet::stats::growth_diagnostics;
use snet::theory::analyze;

fn main() {
    let steps: u32 = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("steps must be a small integer"))
        .unwrap_or(7);
    let seed: u64 = std::env::args()
        .nth(2)
        .map(|s| s.parse().expect("seed must be an integer"))
        .unwrap_or(42);

    let rules_text = include_str!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../fixtures/two_color_rules.json"
    ));
    let init_text = include_str!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../fixtures/two_color_init.json"
    ));
    let rs = parse_ruleset(rules_text).expect("bundled rules are valid");
    let init = parse_initial_graph(init_text, rs.num_colors).expect("bundled graph is valid");
    let report = analyze(&rs).expect("bundled rules meet the hypotheses");

    let budget = 4 * 1024 * 1024 * 1024;
    let (graph, summary) = match generate(&rs, &init, steps, seed, budget) {
        Ok(pair) => pair,
        Err(e) => {
            eprintln!("cannot grow {steps} rounds: {e}");
            std::process::exit(3);
        }
    };
    println!("sizes per round:");
    print!("{}", summary.to_csv());
    println!();
    println!(
        "growth ratios against rho(M) = {:.4} and rho(N) = {:.4}:",
        report.rho_m.unwrap(),
        report.rho_n.unwrap()
    );
    print!("{}", growth_diagnostics(&summary, &report).to_csv());
    println!();
    println!(
        "final graph: {} nodes, {} arcs, max degree {}",
        graph.node_count(),
        graph.arc_count(),
        graph.max_degree()
    );
}
