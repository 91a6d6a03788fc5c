//! Parse a rule file and check the two structural conditions.
//!
//! Run with `cargo run --example validate_rules [rule-file]`.

use snet::rulesio::{check_structural_conditions, parse_ruleset_lenient};

fn main() {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/two_color_rules.json").into()
    });
    let text = std::fs::read_to_string(&path).expect("readable rule file");
    let rs = match parse_ruleset_lenient(&text) {
        Ok(rs) => rs,
        Err(e) => {
            eprintln!("{path}: {e}");
            std::process::exit(1);
        }
    };
    println!("{path}: {} colors", rs.num_colors);
    for color in 1..=rs.num_colors {
        for (k, rule) in rs.rules_for(color).iter().enumerate() {
            println!(
                "  rule ({color},{}): p = {}, {} nodes, {} arcs",
                k + 1,
                rule.probability,
                rule.network.nodes.len(),
                rule.network.arcs.len()
            );
        }
    }
    let mut all_ok = true;
    for report in check_structural_conditions(&rs) {
        let show = |ok: bool, witness: Option<usize>| match (ok, witness) {
            (true, Some(k)) => format!("ok (rule {})", k + 1),
            (true, None) => "ok".into(),
            (false, _) => "FAILED".into(),
        };
        println!(
            "color {}: markers apart {}; busy marker {}",
            report.color,
            show(report.condition_a, report.witness_a),
            show(report.condition_b, report.witness_b)
        );
        all_ok &= report.condition_a && report.condition_b;
    }
    if all_ok {
        println!("rule set is valid");
    } else {
        println!("rule set violates the structural conditions");
        std::process::exit(1);
    }
}
