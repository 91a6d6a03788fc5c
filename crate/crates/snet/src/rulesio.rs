//! Rule-set and initial-graph files: parsing, serialization, validation.
//!
//! A rule set assigns each arc color `i ∈ {1..λ}` a list of replacement
//! networks `R_ik` with exact rational probabilities `p_ik` summing to 1.
//! Each replacement network is a small colored multigraph over string labels
//! in which the reserved labels `A` and `B` mark the nodes glued onto the
//! endpoints of the arc being replaced.
//!
//! Two structural conditions are enforced per color on accepted rule sets:
//!
//! - (a) some rule keeps the markers at undirected distance greater than 1
//!   (no arc directly joins `A` and `B`; absence of any path also counts),
//! - (b) some rule gives marker `A` or marker `B` total degree greater
//!   than 1 (in-degree plus out-degree over all colors, self-loops counting
//!   twice).
//!
//! Together they rule out systems that merely recolor arcs forever. Parsing
//! treats a violation as a hard error; [`parse_ruleset_lenient`] exists for
//! exploratory use and skips only this last step.
//!
//! Probabilities travel as exact `"num/den"` strings. Decimal notation is
//! rejected on purpose: expectation matrices must come out exactly, and
//! `0.333…` would silently ruin that.

use std::collections::BTreeMap;
use std::collections::HashSet;
use std::str::FromStr;

use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::Rational;

/// Reserved label for the node glued onto the replaced arc's source.
pub const MARKER_A: &str = "A";
/// Reserved label for the node glued onto the replaced arc's destination.
pub const MARKER_B: &str = "B";

/// Errors from parsing or validating rule and graph files.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RulesError {
    /// Not valid JSON, or structurally not a rule/graph file.
    #[error("malformed file: {0}")]
    MalformedFile(String),
    /// The probabilities of one color do not sum to exactly 1.
    #[error("probabilities for color {color} sum to {sum}, expected 1")]
    ProbabilitySum { color: u8, sum: String },
    /// A replacement network lacks marker `A` or `B`.
    #[error("rule {rule_index} for color {color} is missing marker node \"{label}\"")]
    MissingEndpoint {
        color: u8,
        rule_index: usize,
        label: &'static str,
    },
    /// An arc color lies outside `1..=num_colors`.
    #[error("arc color {color} out of range 1..={num_colors}")]
    UnknownColor { color: u32, num_colors: u8 },
    /// An arc endpoint is not in the owning node list.
    #[error("arc endpoint \"{label}\" is not a declared node ({context})")]
    UndeclaredNode { context: String, label: String },
    /// A color fails structural condition (a) or (b).
    #[error("color {color} violates structural condition ({condition}): {detail}")]
    StructuralCondition {
        color: u8,
        condition: char,
        detail: String,
    },
    /// The initial graph has no arcs.
    #[error("initial graph has no arcs")]
    EmptyGraph,
}

/// One replacement network: labeled nodes, colored arcs, markers `A`/`B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplacementNetwork {
    /// Node labels, unique, containing `A` and `B`.
    pub nodes: Vec<String>,
    /// Arcs as `(source label, destination label, color)`.
    pub arcs: Vec<(String, String, u8)>,
}

impl ReplacementNetwork {
    /// Position of a label in the node list.
    pub fn node_index(&self, label: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == label)
    }

    /// Arc counts per color: entry `j` is the number of `(j+1)`-colored arcs.
    pub fn color_counts(&self, num_colors: u8) -> Vec<u64> {
        let mut counts = vec![0u64; num_colors as usize];
        for &(_, _, c) in &self.arcs {
            counts[(c - 1) as usize] += 1;
        }
        counts
    }

    /// Per-color out/in arc counts at one node, laid out
    /// `[out_1, in_1, out_2, in_2, …]`.
    ///
    /// This is the column convention of the degree matrix `N` and of the
    /// generator's degree vectors; a self-loop contributes to both slots.
    pub fn incidence(&self, label: &str, num_colors: u8) -> Vec<u64> {
        let mut v = vec![0u64; 2 * num_colors as usize];
        for (src, dst, c) in &self.arcs {
            let base = 2 * (*c as usize - 1);
            if src == label {
                v[base] += 1;
            }
            if dst == label {
                v[base + 1] += 1;
            }
        }
        v
    }

    /// Total degree (in + out over all colors) of one node.
    pub fn degree(&self, label: &str, num_colors: u8) -> u64 {
        self.incidence(label, num_colors).iter().sum()
    }

    /// True when no arc directly joins `A` and `B` in either direction,
    /// i.e. the undirected distance between the markers exceeds 1 (markers
    /// in different components count as distance ∞).
    pub fn markers_apart(&self) -> bool {
        !self.arcs.iter().any(|(src, dst, _)| {
            (src == MARKER_A && dst == MARKER_B) || (src == MARKER_B && dst == MARKER_A)
        })
    }
}

/// One weighted rule: a replacement network and its selection probability.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub network: ReplacementNetwork,
    pub probability: Rational,
}

/// A full substitution system: `num_colors` colors, one rule list per color.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleSet {
    pub num_colors: u8,
    /// `rules[i]` lists the rules for color `i + 1`.
    pub rules: Vec<Vec<Rule>>,
}

impl RuleSet {
    /// Validates well-formedness and builds the rule set.
    ///
    /// Checks probabilities (positive, exact sum 1 per color), marker
    /// presence, declared endpoints, color ranges, and label uniqueness.
    /// Structural conditions are NOT enforced here; parsing does that, and
    /// [`check_structural_conditions`] reports on them without judgment.
    pub fn new(num_colors: u8, rules: Vec<Vec<Rule>>) -> Result<Self, RulesError> {
        if num_colors == 0 {
            return Err(RulesError::MalformedFile(
                "num_colors must be at least 1".into(),
            ));
        }
        if rules.len() != num_colors as usize {
            return Err(RulesError::MalformedFile(format!(
                "expected rule lists for {} colors, found {}",
                num_colors,
                rules.len()
            )));
        }
        for (ci, color_rules) in rules.iter().enumerate() {
            let color = (ci + 1) as u8;
            if color_rules.is_empty() {
                return Err(RulesError::MalformedFile(format!(
                    "color {color} has no rules"
                )));
            }
            let mut sum = Rational::zero();
            for (k, rule) in color_rules.iter().enumerate() {
                validate_network(&rule.network, color, k, num_colors)?;
                if !rule.probability.is_positive() {
                    return Err(RulesError::MalformedFile(format!(
                        "rule {k} for color {color} has nonpositive probability {}",
                        rule.probability
                    )));
                }
                sum += &rule.probability;
            }
            if !sum.is_one() {
                return Err(RulesError::ProbabilitySum {
                    color,
                    sum: sum.to_string(),
                });
            }
        }
        Ok(RuleSet { num_colors, rules })
    }

    /// Rules registered for `color` (1-based).
    pub fn rules_for(&self, color: u8) -> &[Rule] {
        &self.rules[(color - 1) as usize]
    }
}

/// An initial graph `G^0`: labeled nodes and colored arcs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InitialGraph {
    pub nodes: Vec<String>,
    pub arcs: Vec<(String, String, u8)>,
}

impl InitialGraph {
    /// Validates and builds an initial graph against a color count.
    pub fn new(
        nodes: Vec<String>,
        arcs: Vec<(String, String, u8)>,
        num_colors: u8,
    ) -> Result<Self, RulesError> {
        if arcs.is_empty() {
            return Err(RulesError::EmptyGraph);
        }
        check_unique_labels(&nodes, "initial graph")?;
        let declared: HashSet<&str> = nodes.iter().map(|s| s.as_str()).collect();
        for (src, dst, color) in &arcs {
            check_color(*color as u32, num_colors)?;
            for label in [src, dst] {
                if !declared.contains(label.as_str()) {
                    return Err(RulesError::UndeclaredNode {
                        context: "initial graph".into(),
                        label: label.clone(),
                    });
                }
            }
        }
        Ok(InitialGraph { nodes, arcs })
    }
}

/// Per-color structural-condition report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionReport {
    /// Color the report is about (1-based).
    pub color: u8,
    /// Some rule keeps the markers at distance greater than 1.
    pub condition_a: bool,
    /// Some rule gives a marker total degree greater than 1.
    pub condition_b: bool,
    /// Index of the first rule witnessing condition (a).
    pub witness_a: Option<usize>,
    /// Index of the first rule witnessing condition (b).
    pub witness_b: Option<usize>,
}

/// Reports, per color, whether the structural conditions hold and which rule
/// index witnesses each.
pub fn check_structural_conditions(rs: &RuleSet) -> Vec<ConditionReport> {
    (1..=rs.num_colors)
        .map(|color| {
            let rules = rs.rules_for(color);
            let witness_a = rules.iter().position(|r| r.network.markers_apart());
            let witness_b = rules.iter().position(|r| {
                r.network.degree(MARKER_A, rs.num_colors) > 1
                    || r.network.degree(MARKER_B, rs.num_colors) > 1
            });
            ConditionReport {
                color,
                condition_a: witness_a.is_some(),
                condition_b: witness_b.is_some(),
                witness_a,
                witness_b,
            }
        })
        .collect()
}

/// Parses and fully validates a rule-set file, structural conditions included.
pub fn parse_ruleset(text: &str) -> Result<RuleSet, RulesError> {
    let rs = parse_ruleset_lenient(text)?;
    for report in check_structural_conditions(&rs) {
        if !report.condition_a {
            return Err(RulesError::StructuralCondition {
                color: report.color,
                condition: 'a',
                detail: "no rule separates markers A and B by distance greater than 1".into(),
            });
        }
        if !report.condition_b {
            return Err(RulesError::StructuralCondition {
                color: report.color,
                condition: 'b',
                detail: "no rule gives marker A or B total degree greater than 1".into(),
            });
        }
    }
    Ok(rs)
}

/// Parses a rule-set file, checking well-formedness but skipping the
/// structural conditions.
pub fn parse_ruleset_lenient(text: &str) -> Result<RuleSet, RulesError> {
    let raw: RuleFileJson =
        serde_json::from_str(text).map_err(|e| RulesError::MalformedFile(e.to_string()))?;
    if raw.num_colors == 0 || raw.num_colors > u8::MAX as u32 {
        return Err(RulesError::MalformedFile(format!(
            "num_colors must be in 1..=255, got {}",
            raw.num_colors
        )));
    }
    let num_colors = raw.num_colors as u8;
    let mut rules: Vec<Vec<Rule>> = vec![Vec::new(); num_colors as usize];
    for (key, entries) in &raw.rules {
        let color: u32 = key.parse().map_err(|_| {
            RulesError::MalformedFile(format!("rule key {key:?} is not a color index"))
        })?;
        check_color(color, num_colors)?;
        let list = &mut rules[(color - 1) as usize];
        for entry in entries {
            let probability = parse_probability(&entry.p)?;
            let arcs = entry
                .arcs
                .iter()
                .map(|(src, dst, c)| {
                    check_color(*c, num_colors)?;
                    Ok((src.clone(), dst.clone(), *c as u8))
                })
                .collect::<Result<Vec<_>, RulesError>>()?;
            list.push(Rule {
                network: ReplacementNetwork {
                    nodes: entry.nodes.clone(),
                    arcs,
                },
                probability,
            });
        }
    }
    RuleSet::new(num_colors, rules)
}

/// Serializes a rule set back to the file format (pretty-printed JSON).
pub fn serialize_ruleset(rs: &RuleSet) -> String {
    let rules = rs
        .rules
        .iter()
        .enumerate()
        .map(|(ci, color_rules)| {
            let entries = color_rules
                .iter()
                .map(|rule| RuleJson {
                    p: rule.probability.to_string(),
                    nodes: rule.network.nodes.clone(),
                    arcs: rule
                        .network
                        .arcs
                        .iter()
                        .map(|(s, d, c)| (s.clone(), d.clone(), *c as u32))
                        .collect(),
                })
                .collect();
            ((ci + 1).to_string(), entries)
        })
        .collect();
    let file = RuleFileJson {
        num_colors: rs.num_colors as u32,
        rules,
    };
    serde_json::to_string_pretty(&file).expect("rule sets always serialize")
}

/// Parses an initial-graph file; `num_colors` comes from the rule-set context.
pub fn parse_initial_graph(text: &str, num_colors: u8) -> Result<InitialGraph, RulesError> {
    let raw: GraphJson =
        serde_json::from_str(text).map_err(|e| RulesError::MalformedFile(e.to_string()))?;
    let arcs = raw
        .arcs
        .iter()
        .map(|(src, dst, c)| {
            check_color(*c, num_colors)?;
            Ok((src.clone(), dst.clone(), *c as u8))
        })
        .collect::<Result<Vec<_>, RulesError>>()?;
    InitialGraph::new(raw.nodes, arcs, num_colors)
}

/// Serializes an initial graph to the file format.
pub fn serialize_initial_graph(g: &InitialGraph) -> String {
    let file = GraphJson {
        nodes: g.nodes.clone(),
        arcs: g
            .arcs
            .iter()
            .map(|(s, d, c)| (s.clone(), d.clone(), *c as u32))
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("graphs always serialize")
}

#[derive(Serialize, Deserialize)]
struct RuleFileJson {
    num_colors: u32,
    rules: BTreeMap<String, Vec<RuleJson>>,
}

#[derive(Serialize, Deserialize)]
struct RuleJson {
    p: String,
    nodes: Vec<String>,
    arcs: Vec<(String, String, u32)>,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    nodes: Vec<String>,
    arcs: Vec<(String, String, u32)>,
}

fn check_color(color: u32, num_colors: u8) -> Result<(), RulesError> {
    if color == 0 || color > num_colors as u32 {
        return Err(RulesError::UnknownColor { color, num_colors });
    }
    Ok(())
}

fn check_unique_labels(nodes: &[String], context: &str) -> Result<(), RulesError> {
    let mut seen = HashSet::new();
    for n in nodes {
        if !seen.insert(n.as_str()) {
            return Err(RulesError::MalformedFile(format!(
                "{context}: duplicate node label \"{n}\""
            )));
        }
    }
    Ok(())
}

fn validate_network(
    net: &ReplacementNetwork,
    color: u8,
    rule_index: usize,
    num_colors: u8,
) -> Result<(), RulesError> {
    let context = format!("rule {rule_index} for color {color}");
    check_unique_labels(&net.nodes, &context)?;
    for label in [MARKER_A, MARKER_B] {
        if net.node_index(label).is_none() {
            return Err(RulesError::MissingEndpoint {
                color,
                rule_index,
                label,
            });
        }
    }
    if net.arcs.is_empty() {
        return Err(RulesError::MalformedFile(format!(
            "{context} has no arcs"
        )));
    }
    let declared: HashSet<&str> = net.nodes.iter().map(|s| s.as_str()).collect();
    for (src, dst, c) in &net.arcs {
        check_color(*c as u32, num_colors)?;
        for label in [src, dst] {
            if !declared.contains(label.as_str()) {
                return Err(RulesError::UndeclaredNode {
                    context: context.clone(),
                    label: label.clone(),
                });
            }
        }
    }
    Ok(())
}

pub(crate) fn parse_probability(text: &str) -> Result<Rational, RulesError> {
    // Rational::from_str accepts "n/d" and plain integers but not decimals,
    // which is exactly the file contract.
    Rational::from_str(text)
        .map_err(|_| RulesError::MalformedFile(format!("invalid probability {text:?}")))
}
