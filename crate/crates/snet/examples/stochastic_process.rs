//! Run the arc-count process induced by the bundled rules: one long
//! trajectory, then a martingale check over many short trials.
//!
//! Run with `cargo run --release --example stochastic_process [steps] [seed]`.

use snet::linalg::rational_to_f64;
use snet::process::{martingale_diagnostic, trajectory};
use snet::rulesio::parse_ruleset;
use snet::theory::{analyze, arc_process};

fn main() {
    let steps: u64 = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("steps must be an integer"))
        .unwrap_or(25);
    let seed: u64 = std::env::args()
        .nth(2)
        .map(|s| s.parse().expect("seed must be an integer"))
        .unwrap_or(7);

    let rules_text = include_str!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../fixtures/two_color_rules.json"
    ));
    let rs = parse_ruleset(rules_text).expect("bundled rules are valid");
    let report = analyze(&rs).expect("bundled rules meet the hypotheses");
    let spec = arc_process(&rs).expect("arc process is well formed");

    // One arc of the first color, as in the bundled starting graph.
    let mut alpha0 = vec![0u128; spec.dim()];
    alpha0[0] = 1;

    let traj = trajectory(&spec, &alpha0, steps, seed).expect("trajectory fits in u128");
    println!("single trajectory (xi_t = total arc count):");
    print!("{}", traj.to_csv());
    let last = *traj.xi.last().unwrap();
    let rate = (last as f64).ln() / steps as f64;
    println!();
    println!(
        "log xi_{steps} / {steps} = {:.4}; log rho(M) = {:.4}",
        rate,
        report.rho_m.unwrap().ln()
    );

    let trials = 2000;
    let t_max = 8;
    let diag = martingale_diagnostic(&spec, &alpha0, t_max, trials, seed)
        .expect("mean matrix is invertible");
    println!();
    println!("martingale means over {trials} trials (should stay near alpha_0):");
    print!("{}", diag.to_csv());

    let m = spec.mean_matrix();
    println!();
    println!("mean replacement matrix:");
    for i in 0..spec.dim() {
        let row: Vec<String> = (0..spec.dim())
            .map(|j| format!("{:.4}", rational_to_f64(m.get(i, j))))
            .collect();
        println!("  [{}]", row.join("  "));
    }
}
