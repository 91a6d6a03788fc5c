//! Tour of the exact matrix toolkit: determinants, inverses, primitivity,
//! power iteration, and the two-sided bounds from weighted row sums.
//!
//! Run with `cargo run --example spectral_toolkit`.

use snet::linalg::{rational_to_f64, RationalMatrix, DEFAULT_MAX_ITER, DEFAULT_TOL};
use snet::rulesio::parse_ruleset;
use snet::theory::build_degree_matrix;

fn transpose(m: &RationalMatrix) -> RationalMatrix {
    let n = m.dim();
    RationalMatrix::from_rows(
        (0..n)
            .map(|j| (0..n).map(|i| m.get(i, j).clone()).collect())
            .collect(),
    )
}

fn print_matrix(label: &str, m: &RationalMatrix) {
    println!("{label}:");
    for i in 0..m.dim() {
        let row: Vec<String> = (0..m.dim()).map(|j| m.get(i, j).to_string()).collect();
        println!("  [{}]", row.join("  "));
    }
}

fn main() {
    let rules_text = include_str!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../fixtures/two_color_rules.json"
    ));
    let rs = parse_ruleset(rules_text).expect("bundled rules are valid");
    let n = build_degree_matrix(&rs);

    print_matrix("degree matrix N", &n);
    println!();
    println!("det(N) = {}", n.determinant());
    println!("primitive: {}", n.is_primitive());

    let inv = n.inverse().expect("det is nonzero");
    print_matrix("N^-1 (exact)", &inv);
    let check = n.mat_mul(&inv).expect("same dimension");
    println!("N * N^-1 == I: {}", check == RationalMatrix::identity(n.dim()));
    println!();

    let spec = n
        .spectral_radius(DEFAULT_TOL, DEFAULT_MAX_ITER)
        .expect("N is primitive");
    println!(
        "power iteration: rho(N) = {:.12} after {} iterations (residual {:.2e})",
        spec.rho, spec.iterations, spec.residual
    );
    println!(
        "left eigenvector (l1-normalized): {:?}",
        spec.left_vector
            .iter()
            .map(|x| format!("{x:.6}"))
            .collect::<Vec<_>>()
    );
    println!();

    // Weighted row sums bracket the spectral radius for any positive weights;
    // with the right eigenvector as weights the bracket collapses to rho.
    let right = transpose(&n)
        .spectral_radius(DEFAULT_TOL, DEFAULT_MAX_ITER)
        .expect("transpose is primitive too")
        .left_vector;
    let flat = vec![1.0; n.dim()];
    let (lo, hi) = n.collatz_bounds(&flat).expect("weights are positive");
    println!("flat weights:        {lo:.6} <= rho(N) <= {hi:.6}");
    let (lo, hi) = n.collatz_bounds(&right).expect("weights are positive");
    println!("eigenvector weights: {lo:.6} <= rho(N) <= {hi:.6}");
    println!();

    // Exact powers: the l1 norm of e_1 N^t grows like rho(N)^t,
    // so log(mass)/t approaches log rho(N).
    println!("growth of |e_1 N^t|_1 (log rho(N) = {:.6}):", spec.rho.ln());
    for t in [1u64, 2, 4, 8, 16, 32] {
        let p = n.pow(t);
        let mass: f64 = (0..n.dim()).map(|j| rational_to_f64(p.get(0, j))).sum();
        println!("  t = {t:>2}: mass = {mass:.6e}, log mass / t = {:.6}", mass.ln() / t as f64);
    }
}
