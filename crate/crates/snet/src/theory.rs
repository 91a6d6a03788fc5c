//! Mean matrices of a rule set and the growth exponents they predict.
//!
//! Two matrices summarize a rule set in expectation. The arc matrix `M`
//! (λ×λ) has entry `(i, j)` equal to the expected number of `j`-colored arcs
//! that replace one `i`-colored arc. The degree matrix `N` (2λ×2λ) tracks the
//! two endpoints of a replaced arc: for each color there is a row for the
//! tail-side marker `A` and one for the head-side marker `B`, and the columns
//! list expected out- and in-degrees per color at that marker. Arc counts
//! grow like `ρ(M)^t` and the maximal degree like `ρ(N)^t`, so when both
//! matrices are primitive and invertible and growth is genuine (`ρ(N) > 1`)
//! the degree distribution follows a power law with exponent
//! `log ρ(M) / log ρ(N)`.

use std::fmt;

use serde_json::{json, Value};

use crate::linalg::{
    rational_l1, row_times_matrix, Rational, RationalMatrix, DEFAULT_MAX_ITER, DEFAULT_TOL,
};
use crate::process::{ProcessError, ProcessSpec};
use crate::rulesio::{check_structural_conditions, ConditionReport, RuleSet, MARKER_A, MARKER_B};

/// Expected arc-count matrix `M`: entry `(i, j)` is the mean number of
/// `j`-colored arcs produced when one `i`-colored arc is substituted.
///
/// Rows and columns are 0-based here, so color `c` maps to index `c - 1`.
pub fn build_arc_matrix(rs: &RuleSet) -> RationalMatrix {
    let lambda = rs.num_colors as usize;
    let mut m = RationalMatrix::zeros(lambda);
    for i in 0..lambda {
        for rule in rs.rules_for((i + 1) as u8) {
            let counts = rule.network.color_counts(rs.num_colors);
            for (j, &c) in counts.iter().enumerate() {
                if c > 0 {
                    let add = &rule.probability * Rational::from_integer(c.into());
                    m.set(i, j, m.get(i, j) + add);
                }
            }
        }
    }
    m
}

/// Expected endpoint-degree matrix `N` (2λ×2λ).
///
/// Row `2(i-1)` describes marker `A` of color-`i` rules and row `2(i-1)+1`
/// marker `B`. Columns come in per-color pairs `(out-degree, in-degree)`, the
/// same layout [`crate::rulesio::ReplacementNetwork::incidence`] produces, so
/// entry `(row, 2(j-1))` is the expected number of `j`-colored arcs leaving
/// that marker and `(row, 2(j-1)+1)` the expected number arriving.
pub fn build_degree_matrix(rs: &RuleSet) -> RationalMatrix {
    let lambda = rs.num_colors as usize;
    let mut n = RationalMatrix::zeros(2 * lambda);
    for i in 0..lambda {
        for rule in rs.rules_for((i + 1) as u8) {
            for (offset, marker) in [(0, MARKER_A), (1, MARKER_B)] {
                let row = 2 * i + offset;
                let inc = rule.network.incidence(marker, rs.num_colors);
                for (col, &c) in inc.iter().enumerate() {
                    if c > 0 {
                        let add = &rule.probability * Rational::from_integer(c.into());
                        n.set(row, col, n.get(row, col) + add);
                    }
                }
            }
        }
    }
    n
}

/// Everything `analyze` learns about a rule set.
#[derive(Debug, Clone)]
pub struct TheoryReport {
    /// Expected arc-count matrix.
    pub m_matrix: RationalMatrix,
    /// Expected endpoint-degree matrix.
    pub n_matrix: RationalMatrix,
    /// Spectral radius of `M`, when power iteration applies and converges.
    pub rho_m: Option<f64>,
    /// Spectral radius of `N`, when power iteration applies and converges.
    pub rho_n: Option<f64>,
    /// Whether some power of `M` is entrywise positive.
    pub m_primitive: bool,
    /// Whether some power of `N` is entrywise positive.
    pub n_primitive: bool,
    /// Whether `det M ≠ 0`.
    pub m_invertible: bool,
    /// Whether `det N ≠ 0`.
    pub n_invertible: bool,
    /// Per-color structural-condition results.
    pub structural: Vec<ConditionReport>,
    /// `log ρ(M) / log ρ(N)`; populated only when all hypotheses hold and
    /// `ρ(N) > 1`.
    pub degree_dimension: Option<f64>,
    /// True when both matrices are primitive and invertible and every color
    /// passes both structural conditions.
    pub hypotheses_met: bool,
}

impl TheoryReport {
    /// Renders the report as JSON. Matrix entries become exact `"num/den"`
    /// strings; spectral radii and the dimension are decimals, `null` when
    /// unavailable.
    pub fn to_json(&self) -> Value {
        json!({
            "m_matrix": matrix_strings(&self.m_matrix),
            "n_matrix": matrix_strings(&self.n_matrix),
            "rho_m": self.rho_m,
            "rho_n": self.rho_n,
            "m_primitive": self.m_primitive,
            "n_primitive": self.n_primitive,
            "m_invertible": self.m_invertible,
            "n_invertible": self.n_invertible,
            "degree_dimension": self.degree_dimension,
            "hypotheses_met": self.hypotheses_met,
        })
    }

    /// Names of every hypothesis that failed, empty when all hold.
    ///
    /// Flag names mirror the report fields; structural failures are tagged
    /// `condition_a_color_C` / `condition_b_color_C`. When the structural
    /// conditions hold, growth must be genuine, so `rho_m_gt_one` or
    /// `rho_n_gt_one` is added if the corresponding radius fails to exceed 1.
    pub fn failed_hypotheses(&self) -> Vec<String> {
        let mut failed = Vec::new();
        let mut structural_ok = true;
        for cr in &self.structural {
            if !cr.condition_a {
                failed.push(format!("condition_a_color_{}", cr.color));
                structural_ok = false;
            }
            if !cr.condition_b {
                failed.push(format!("condition_b_color_{}", cr.color));
                structural_ok = false;
            }
        }
        if !self.m_primitive {
            failed.push("m_primitive".into());
        }
        if !self.n_primitive {
            failed.push("n_primitive".into());
        }
        if !self.m_invertible {
            failed.push("m_invertible".into());
        }
        if !self.n_invertible {
            failed.push("n_invertible".into());
        }
        if structural_ok {
            if matches!(self.rho_m, Some(r) if r <= 1.0) {
                failed.push("rho_m_gt_one".into());
            }
            if matches!(self.rho_n, Some(r) if r <= 1.0) {
                failed.push("rho_n_gt_one".into());
            }
        }
        failed
    }
}

impl fmt::Display for TheoryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "arc matrix M ({0}x{0}):", self.m_matrix.dim())?;
        write_matrix(f, &self.m_matrix)?;
        writeln!(f, "degree matrix N ({0}x{0}):", self.n_matrix.dim())?;
        write_matrix(f, &self.n_matrix)?;
        match self.rho_m {
            Some(r) => writeln!(f, "rho(M) = {r:.12}")?,
            None => writeln!(f, "rho(M) unavailable")?,
        }
        match self.rho_n {
            Some(r) => writeln!(f, "rho(N) = {r:.12}")?,
            None => writeln!(f, "rho(N) unavailable")?,
        }
        writeln!(
            f,
            "M primitive: {}, invertible: {}",
            self.m_primitive, self.m_invertible
        )?;
        writeln!(
            f,
            "N primitive: {}, invertible: {}",
            self.n_primitive, self.n_invertible
        )?;
        for cr in &self.structural {
            writeln!(
                f,
                "color {}: condition (a) {}, condition (b) {}",
                cr.color,
                if cr.condition_a { "ok" } else { "FAILED" },
                if cr.condition_b { "ok" } else { "FAILED" },
            )?;
        }
        match self.degree_dimension {
            Some(d) => writeln!(f, "degree dimension = {d:.12}")?,
            None => writeln!(f, "degree dimension unavailable")?,
        }
        write!(f, "hypotheses met: {}", self.hypotheses_met)
    }
}

fn matrix_strings(m: &RationalMatrix) -> Vec<Vec<String>> {
    (0..m.dim())
        .map(|i| m.row(i).iter().map(|x| x.to_string()).collect())
        .collect()
}

fn write_matrix(f: &mut fmt::Formatter<'_>, m: &RationalMatrix) -> fmt::Result {
    let cells: Vec<Vec<String>> = matrix_strings(m);
    let width = cells
        .iter()
        .flatten()
        .map(|s| s.len())
        .max()
        .unwrap_or(1);
    for row in &cells {
        write!(f, "  [")?;
        for (j, cell) in row.iter().enumerate() {
            if j > 0 {
                write!(f, "  ")?;
            }
            write!(f, "{cell:>width$}")?;
        }
        writeln!(f, "]")?;
    }
    Ok(())
}

/// A rule set that fails one or more of the dimension theorem's hypotheses.
///
/// The partially filled report is still available for inspection.
#[derive(Debug, Clone)]
pub struct HypothesisFailure {
    /// Names of the failed hypotheses, as in
    /// [`TheoryReport::failed_hypotheses`].
    pub failed: Vec<String>,
    /// The report computed anyway.
    pub report: TheoryReport,
}

impl fmt::Display for HypothesisFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "hypotheses failed: {}", self.failed.join(", "))
    }
}

impl std::error::Error for HypothesisFailure {}

/// Builds both matrices, checks every hypothesis, and computes the predicted
/// degree dimension with default spectral tolerances.
pub fn analyze(rs: &RuleSet) -> Result<TheoryReport, HypothesisFailure> {
    analyze_with(rs, DEFAULT_TOL, DEFAULT_MAX_ITER)
}

/// [`analyze`] with explicit power-iteration tolerance and iteration cap.
pub fn analyze_with(
    rs: &RuleSet,
    tol: f64,
    max_iter: usize,
) -> Result<TheoryReport, HypothesisFailure> {
    let m = build_arc_matrix(rs);
    let n = build_degree_matrix(rs);
    let structural = check_structural_conditions(rs);

    let m_primitive = m.is_primitive();
    let n_primitive = n.is_primitive();
    let m_invertible = m.is_invertible();
    let n_invertible = n.is_invertible();
    let rho_m = m.spectral_radius(tol, max_iter).ok().map(|s| s.rho);
    let rho_n = n.spectral_radius(tol, max_iter).ok().map(|s| s.rho);

    let structural_ok = structural.iter().all(|c| c.condition_a && c.condition_b);
    let hypotheses_met =
        m_primitive && n_primitive && m_invertible && n_invertible && structural_ok;

    let degree_dimension = match (hypotheses_met, rho_m, rho_n) {
        (true, Some(rm), Some(rn)) if rn > 1.0 => Some(rm.ln() / rn.ln()),
        _ => None,
    };

    let report = TheoryReport {
        m_matrix: m,
        n_matrix: n,
        rho_m,
        rho_n,
        m_primitive,
        n_primitive,
        m_invertible,
        n_invertible,
        structural,
        degree_dimension,
        hypotheses_met,
    };

    let failed = report.failed_hypotheses();
    if failed.is_empty() {
        Ok(report)
    } else {
        Err(HypothesisFailure { failed, report })
    }
}

/// The per-color arc-count branching process of a rule set.
///
/// Coordinate `i` (0-based) is the count of `(i+1)`-colored arcs; its menu
/// offers each color-`(i+1)` rule's arc-count vector with that rule's
/// probability. The mean matrix equals [`build_arc_matrix`].
pub fn arc_process(rs: &RuleSet) -> Result<ProcessSpec, ProcessError> {
    let menus = (1..=rs.num_colors)
        .map(|color| {
            rs.rules_for(color)
                .iter()
                .map(|rule| {
                    let row = rule
                        .network
                        .color_counts(rs.num_colors)
                        .into_iter()
                        .map(u128::from)
                        .collect();
                    (rule.probability.clone(), row)
                })
                .collect()
        })
        .collect();
    ProcessSpec::from_row_menus(menus)
}

/// The endpoint-degree branching process of a rule set.
///
/// Coordinates follow the degree-matrix layout: `2(i-1)` is the per-color
/// out/in incidence at marker `A` of a color-`i` substitution, `2(i-1)+1` at
/// marker `B`. The mean matrix equals [`build_degree_matrix`].
pub fn degree_process(rs: &RuleSet) -> Result<ProcessSpec, ProcessError> {
    let mut menus = Vec::with_capacity(2 * rs.num_colors as usize);
    for color in 1..=rs.num_colors {
        for marker in [MARKER_A, MARKER_B] {
            menus.push(
                rs.rules_for(color)
                    .iter()
                    .map(|rule| {
                        let row = rule
                            .network
                            .incidence(marker, rs.num_colors)
                            .into_iter()
                            .map(u128::from)
                            .collect();
                        (rule.probability.clone(), row)
                    })
                    .collect(),
            );
        }
    }
    ProcessSpec::from_row_menus(menus)
}

/// Expected total arc count after `t` substitution rounds of a graph with
/// per-color arc counts `chi0`, i.e. `‖chi0 · M^t‖₁`, exactly.
pub fn expected_arc_count(rs: &RuleSet, chi0: &[Rational], t: u32) -> Rational {
    let m = build_arc_matrix(rs);
    let mut v = chi0.to_vec();
    for _ in 0..t {
        v = row_times_matrix(&v, &m).expect("chi0 length matches color count");
    }
    rational_l1(&v)
}

/// Expected number of new nodes created per substituted arc, by color:
/// `Σ_k p_ik (|V(R_ik)| − 2)`. The two markers are glued onto existing
/// nodes, so they do not count.
pub fn fresh_node_weights(rs: &RuleSet) -> Vec<Rational> {
    (1..=rs.num_colors)
        .map(|color| {
            rs.rules_for(color)
                .iter()
                .map(|rule| {
                    &rule.probability
                        * Rational::from_integer((rule.network.nodes.len() as i64 - 2).into())
                })
                .sum()
        })
        .collect()
}

/// Expected node count after `t` rounds: the initial nodes plus, for each
/// earlier round, the expected arcs present then weighted by
/// [`fresh_node_weights`].
pub fn expected_node_count(
    rs: &RuleSet,
    nodes0: u64,
    chi0: &[Rational],
    t: u32,
) -> Rational {
    let m = build_arc_matrix(rs);
    let weights = fresh_node_weights(rs);
    let mut total = Rational::from_integer(nodes0.into());
    let mut v = chi0.to_vec();
    for _ in 0..t {
        total += v
            .iter()
            .zip(&weights)
            .map(|(c, w)| c * w)
            .sum::<Rational>();
        v = row_times_matrix(&v, &m).expect("chi0 length matches color count");
    }
    total
}

/// Dimension estimate from two externally supplied spectral radii.
pub fn dimension_from_radii(rho_m: f64, rho_n: f64) -> f64 {
    rho_m.ln() / rho_n.ln()
}
