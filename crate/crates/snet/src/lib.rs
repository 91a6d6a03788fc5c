//! Random colored substitution networks: generation, spectral prediction,
//! and degree-distribution measurement.
//!
//! A substitution system iteratively rewrites a colored directed multigraph:
//! every arc of color `i` is replaced, independently and at random, by one of
//! the replacement networks registered for that color, gluing the network's
//! marked nodes `A` and `B` onto the arc's endpoints. Starting from an
//! initial graph `G^0` this produces a growing random sequence `G^1, G^2, …`
//! whose arc counts, node counts, and maximum degree all grow geometrically.
//! Two expectation matrices summarize the system: the arc matrix `M` (expected
//! per-color arc counts created by one substitution) and the degree matrix `N`
//! (expected per-color in/out arc counts left at the glued endpoints). When
//! both are primitive and invertible, the degree distribution of `G^t`
//! approaches a power law whose exponent is `log ρ(M) / log ρ(N)`.
//!
//! The crate is organized bottom-up:
//!
//! - [`rng`] — counter-based randomness, reproducible under any parallel
//!   schedule
//! - [`linalg`] — exact rational matrices and the nonnegative-matrix toolkit
//!   (primitivity, determinants, spectral radius, Collatz–Wielandt bounds)
//! - [`rulesio`] — rule-set and graph file formats plus structural validation
//! - [`theory`] — builds `M` and `N` from a rule set and predicts the degree
//!   dimension
//! - [`process`] — the vector-valued branching process abstracting arc and
//!   degree counts, with martingale diagnostics
//! - [`generator`] — the full graph engine producing `G^0 … G^t`
//! - [`stats`] — degree histograms, power-law regression, growth diagnostics
//! - [`cli`] — the `snet` command-line front end binding everything together
//!
//! The `examples/` directory is the front door; each example is a runnable
//! walkthrough of one capability:
//!
//! ```text
//! cargo run --example validate_rules      # parse a rule file, report structural conditions
//! cargo run --example theory_report       # M, N, spectral radii, predicted dimension
//! cargo run --example grow_network        # generate G^0..G^7 and compare growth ratios
//! cargo run --example estimate_dimension  # ten seeded runs, per-run power-law fits
//! cargo run --example stochastic_process  # branching-process trajectories and martingale check
//! cargo run --example spectral_toolkit    # the linear-algebra layer on its own
//! ```

#![forbid(unsafe_code)]

pub mod cli;
pub mod generator;
pub mod linalg;
pub mod process;
pub mod rng;
pub mod rulesio;
pub mod stats;
pub mod theory;
