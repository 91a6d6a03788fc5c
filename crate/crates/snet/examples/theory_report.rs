//! Build the mean matrices of a rule set and print the predicted
//! degree dimension.
//!
//! Run with `cargo run --example theory_report [rule-file]`.

use snet::rulesio::parse_ruleset_lenient;
use snet::theory::analyze;

fn main() {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/two_color_rules.json").into()
    });
    let text = std::fs::read_to_string(&path).expect("readable rule file");
    let rs = parse_ruleset_lenient(&text).expect("well-formed rule file");
    match analyze(&rs) {
        Ok(report) => {
            println!("{report}");
            println!();
            println!("as JSON:");
            println!("{}", serde_json::to_string_pretty(&report.to_json()).unwrap());
        }
        Err(failure) => {
            println!("{}", failure.report);
            println!();
            println!("not all hypotheses hold: {}", failure.failed.join(", "));
            std::process::exit(1);
        }
    }
}
