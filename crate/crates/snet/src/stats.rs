//! Degree statistics of a grown network and the power-law fit that
//! estimates its degree dimension.
//!
//! The degree distribution of a network grown by substitution follows a
//! power law: the fraction of nodes with undirected degree `L` behaves like
//! `L^{-δ}` with `δ = log ρ(M) / log ρ(N)`. Fitting a line to the log-log
//! degree histogram therefore estimates the degree dimension from a single
//! grown graph, and the growth ratios of arcs, nodes, and maximal degree
//! give an independent check of both spectral radii.

use std::collections::BTreeMap;

use serde_json::{json, Value};
use thiserror::Error;

use crate::generator::{ColoredDigraph, GenerationSummary};
use crate::theory::TheoryReport;

/// Statistics failure.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum StatsError {
    /// Fewer than 3 usable histogram bins.
    #[error("power-law fit needs at least 3 bins, {available} available")]
    InsufficientBins {
        /// Bins that passed the filters.
        available: usize,
    },
    /// No arcs, so degrees carry no information.
    #[error("the graph has no arcs")]
    EmptyGraph,
}

/// Node counts by undirected degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeHistogram {
    /// Count of nodes per degree, ascending.
    pub counts: BTreeMap<u64, u64>,
    /// Total node count; the denominator of fractions.
    pub total_nodes: u64,
    /// Largest degree present, 0 for an arcless graph.
    pub max_degree: u64,
}

impl DegreeHistogram {
    /// Builds a histogram from explicit counts. `total_nodes` is taken as
    /// given, so fabricated distributions for testing fits are fine.
    pub fn from_counts(counts: BTreeMap<u64, u64>, total_nodes: u64) -> Self {
        let max_degree = counts
            .iter()
            .filter(|(_, &c)| c > 0)
            .map(|(&l, _)| l)
            .max()
            .unwrap_or(0);
        DegreeHistogram {
            counts,
            total_nodes,
            max_degree,
        }
    }

    /// Fraction of nodes with degree `L`.
    pub fn fraction(&self, l: u64) -> f64 {
        let c = self.counts.get(&l).copied().unwrap_or(0);
        c as f64 / self.total_nodes as f64
    }

    /// CSV rendering with header `L,count,fraction`, ascending by degree.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("L,count,fraction\n");
        for (&l, &c) in &self.counts {
            out.push_str(&format!(
                "{l},{c},{}\n",
                c as f64 / self.total_nodes as f64
            ));
        }
        out
    }
}

/// Counts nodes by undirected degree (in plus out over all colors,
/// self-loops counting 2).
pub fn degree_histogram(g: &ColoredDigraph) -> DegreeHistogram {
    let mut counts = BTreeMap::new();
    for d in g.undirected_degrees() {
        *counts.entry(d).or_insert(0u64) += 1;
    }
    DegreeHistogram::from_counts(counts, g.node_count())
}

/// An ordinary least-squares line through log-log degree data.
#[derive(Debug, Clone)]
pub struct RegressionFit {
    /// Slope of `log(P_L/|V|)` against `log L`; negative for a decaying law.
    pub slope: f64,
    /// Intercept of the fitted line.
    pub intercept: f64,
    /// Coefficient of determination.
    pub r_squared: f64,
    /// Estimated degree dimension, `-slope`.
    pub delta_hat: f64,
    /// The fitted `(log L, log fraction)` points.
    pub points_used: Vec<(f64, f64)>,
    /// The same points before taking logs, as `(L, fraction)`.
    pub raw_points: Vec<(f64, f64)>,
}

impl RegressionFit {
    /// JSON rendering: `{slope, intercept, r_squared, delta_hat, points}`
    /// with points as `{L, frac}` pairs.
    pub fn to_json(&self) -> Value {
        let points: Vec<Value> = self
            .raw_points
            .iter()
            .map(|&(l, frac)| json!({"L": l, "frac": frac}))
            .collect();
        json!({
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "delta_hat": self.delta_hat,
            "points": points,
        })
    }
}

/// Fits `log frac = slope · log L + intercept` by least squares over raw
/// `(L, fraction)` points, all of which must be positive.
pub fn fit_log_log(points: &[(f64, f64)]) -> Result<RegressionFit, StatsError> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|&(l, frac)| l > 0.0 && frac > 0.0)
        .collect();
    if usable.len() < 3 {
        return Err(StatsError::InsufficientBins {
            available: usable.len(),
        });
    }
    let logs: Vec<(f64, f64)> = usable
        .iter()
        .map(|&(l, frac)| (l.ln(), frac.ln()))
        .collect();
    let n = logs.len() as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = logs
        .iter()
        .map(|p| {
            let e = p.1 - (slope * p.0 + intercept);
            e * e
        })
        .sum();
    let ss_tot: f64 = logs.iter().map(|p| (p.1 - mean_y) * (p.1 - mean_y)).sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(RegressionFit {
        slope,
        intercept,
        r_squared,
        delta_hat: -slope,
        points_used: logs,
        raw_points: usable,
    })
}

/// Estimates the degree dimension from a histogram.
///
/// Uses every bin with positive count and `2 ≤ L ≤ max_frac · Δ`;
/// `max_frac = 1.0` keeps the whole upper range. The power law is an
/// asymptotic statement about small `L/Δ` at large `L`, hence the cutoff
/// knob. Degree-1 bins are excluded to match the published fits: pendant
/// nodes are an artifact of individual rule shapes and sit far off the
/// log-log line. Fit [`fit_log_log`] directly to use a different window.
pub fn estimate_dimension(
    h: &DegreeHistogram,
    max_frac: f64,
) -> Result<RegressionFit, StatsError> {
    let cutoff = max_frac * h.max_degree as f64;
    let points: Vec<(f64, f64)> = h
        .counts
        .iter()
        .filter(|(&l, &c)| l >= 2 && c > 0 && l as f64 <= cutoff)
        .map(|(&l, &c)| (l as f64, c as f64 / h.total_nodes as f64))
        .collect();
    fit_log_log(&points)
}

/// Degrees divided by the maximal degree, indexed by node id; every value
/// is in `(0, 1]` once each node carries at least one arc end.
pub fn normalized_degrees(g: &ColoredDigraph) -> Result<Vec<f64>, StatsError> {
    let deg = g.undirected_degrees();
    let max = deg.iter().copied().max().unwrap_or(0);
    if max == 0 {
        return Err(StatsError::EmptyGraph);
    }
    Ok(deg.into_iter().map(|d| d as f64 / max as f64).collect())
}

/// Consecutive-round growth ratios of one run.
#[derive(Debug, Clone)]
pub struct GrowthRow {
    /// The later round; the ratios divide round `t` by round `t-1`.
    pub t: u32,
    /// `|E(G^t)| / |E(G^{t-1})|`.
    pub arc_ratio: f64,
    /// `|V(G^t)| / |V(G^{t-1})|`.
    pub node_ratio: f64,
    /// `Δ(G^t) / Δ(G^{t-1})`.
    pub degree_ratio: f64,
    /// `arc_ratio / ρ(M) - 1`, when `ρ(M)` is known.
    pub arc_deviation: Option<f64>,
    /// `node_ratio / ρ(M) - 1`, when `ρ(M)` is known.
    pub node_deviation: Option<f64>,
    /// `degree_ratio / ρ(N) - 1`, when `ρ(N)` is known.
    pub degree_deviation: Option<f64>,
}

/// Growth ratios of a run against the spectral targets: arc and node counts
/// against `ρ(M)`, maximal degree against `ρ(N)`.
#[derive(Debug, Clone)]
pub struct GrowthDiagnostics {
    /// One row per consecutive round pair.
    pub rows: Vec<GrowthRow>,
    /// Arc and node growth target.
    pub rho_m: Option<f64>,
    /// Degree growth target.
    pub rho_n: Option<f64>,
}

impl GrowthDiagnostics {
    /// CSV rendering; deviation cells are empty when the target is unknown.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "t,arc_ratio,node_ratio,degree_ratio,arc_deviation,node_deviation,degree_deviation\n",
        );
        let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.t,
                r.arc_ratio,
                r.node_ratio,
                r.degree_ratio,
                cell(r.arc_deviation),
                cell(r.node_deviation),
                cell(r.degree_deviation),
            ));
        }
        out
    }
}

/// Compares per-round growth of a run against the rule set's spectral
/// radii. With fewer than two recorded rounds the table is empty.
pub fn growth_diagnostics(
    summary: &GenerationSummary,
    report: &TheoryReport,
) -> GrowthDiagnostics {
    let mut rows = Vec::new();
    for pair in summary.steps.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let ratio = |x: u64, y: u64| x as f64 / y as f64;
        let arc_ratio = ratio(b.arcs, a.arcs);
        let node_ratio = ratio(b.nodes, a.nodes);
        let degree_ratio = ratio(b.max_degree, a.max_degree);
        rows.push(GrowthRow {
            t: b.t,
            arc_ratio,
            node_ratio,
            degree_ratio,
            arc_deviation: report.rho_m.map(|r| arc_ratio / r - 1.0),
            node_deviation: report.rho_m.map(|r| node_ratio / r - 1.0),
            degree_deviation: report.rho_n.map(|r| degree_ratio / r - 1.0),
        });
    }
    GrowthDiagnostics {
        rows,
        rho_m: report.rho_m,
        rho_n: report.rho_n,
    }
}

/// Sample mean and (unbiased) sample standard deviation. The deviation is 0
/// for fewer than two values.
pub fn mean_and_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
