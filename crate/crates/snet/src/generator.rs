//! Growth of a colored network by repeated arc substitution.
//!
//! One round replaces every arc of the current graph at once: an `i`-colored
//! arc `(u, v)` picks a color-`i` rule at random, the rule's marker `A` is
//! glued onto `u` and marker `B` onto `v`, the remaining rule nodes enter the
//! graph as fresh nodes, and the picked rule's arcs are instantiated. The
//! replaced arc itself disappears.
//!
//! Every random choice is derived from a counter RNG keyed by
//! `(seed, round, arc index)`, so the result is a pure function of the seed
//! and the work can be split across threads freely without changing it.

use std::collections::HashMap;
use std::io::{self, BufRead, Write};

use rayon::prelude::*;
use serde::Deserialize;
use thiserror::Error;

use crate::linalg::{rational_to_f64, Rational};
use crate::rng::{domain, CounterRng, DiscreteSampler};
use crate::rulesio::{InitialGraph, RuleSet, RulesError, MARKER_A, MARKER_B};
use crate::theory::expected_arc_count;

/// Rough memory cost of one arc, covering the arc triple itself plus its
/// share of node and scratch storage. Budget checks divide by this.
pub const BYTES_PER_ARC: u64 = 48;

/// A directed colored arc between node ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arc {
    /// Tail node id.
    pub src: u32,
    /// Head node id.
    pub dst: u32,
    /// Color, 1-based.
    pub color: u8,
}

/// Growth failure.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum GrowthError {
    /// The next step (or the pre-flight estimate) needs more arcs than the
    /// memory budget allows.
    #[error("growth needs about {needed_arcs} arcs, over the budget of {limit_arcs}")]
    ArcBudget {
        /// Arcs required, exact for a step about to run, expected for a
        /// pre-flight estimate.
        needed_arcs: u128,
        /// Largest arc count the budget admits.
        limit_arcs: u64,
    },
    /// Node ids no longer fit in 32 bits.
    #[error("node ids exhausted")]
    IdOverflow,
}

/// A multigraph under substitution: arcs with colors, plus the round each
/// node first appeared in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredDigraph {
    step: u32,
    num_colors: u8,
    birth: Vec<u32>,
    arcs: Vec<Arc>,
}

impl ColoredDigraph {
    /// Wraps a validated initial graph as round 0. Node ids follow the
    /// declaration order.
    pub fn from_initial(init: &InitialGraph, num_colors: u8) -> Self {
        let index: HashMap<&str, u32> = init
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i as u32))
            .collect();
        let arcs = init
            .arcs
            .iter()
            .map(|(s, d, c)| Arc {
                src: index[s.as_str()],
                dst: index[d.as_str()],
                color: *c,
            })
            .collect();
        ColoredDigraph {
            step: 0,
            num_colors,
            birth: vec![0; init.nodes.len()],
            arcs,
        }
    }

    /// Substitution rounds applied so far.
    pub fn step(&self) -> u32 {
        self.step
    }

    /// Number of arc colors.
    pub fn num_colors(&self) -> u8 {
        self.num_colors
    }

    /// Number of nodes.
    pub fn node_count(&self) -> u64 {
        self.birth.len() as u64
    }

    /// Number of arcs.
    pub fn arc_count(&self) -> u64 {
        self.arcs.len() as u64
    }

    /// All arcs, in generation order.
    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    /// Round in which each node appeared, indexed by node id.
    pub fn births(&self) -> &[u32] {
        &self.birth
    }

    /// Arc count per color, index `c - 1` for color `c`.
    pub fn color_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.num_colors as usize];
        for a in &self.arcs {
            counts[a.color as usize - 1] += 1;
        }
        counts
    }

    /// Undirected degree (in plus out over all colors) per node id. A
    /// self-loop contributes 2.
    pub fn undirected_degrees(&self) -> Vec<u64> {
        let mut deg = vec![0u64; self.birth.len()];
        for a in &self.arcs {
            deg[a.src as usize] += 1;
            deg[a.dst as usize] += 1;
        }
        deg
    }

    /// Largest undirected degree, 0 for an arcless graph.
    pub fn max_degree(&self) -> u64 {
        self.undirected_degrees().into_iter().max().unwrap_or(0)
    }

    /// Size snapshot of the current round.
    pub fn stats(&self) -> StepStats {
        StepStats {
            t: self.step,
            nodes: self.node_count(),
            arcs: self.arc_count(),
            color_counts: self.color_counts(),
            max_degree: self.max_degree(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Slot {
    Tail,
    Head,
    Fresh(u32),
}

#[derive(Debug, Clone, Copy)]
struct ArcTemplate {
    src: Slot,
    dst: Slot,
    color: u8,
}

#[derive(Debug, Clone)]
struct Template {
    fresh: u32,
    arcs: Vec<ArcTemplate>,
}

/// A rule set lowered to id arithmetic: per color, a sampler over rule
/// probabilities and the rules as slot templates.
#[derive(Debug, Clone)]
pub struct CompiledRules {
    num_colors: u8,
    samplers: Vec<DiscreteSampler>,
    templates: Vec<Vec<Template>>,
}

impl CompiledRules {
    /// Lowers a rule set. Non-marker nodes become fresh slots in declaration
    /// order.
    pub fn compile(rs: &RuleSet) -> Self {
        let mut samplers = Vec::with_capacity(rs.num_colors as usize);
        let mut templates = Vec::with_capacity(rs.num_colors as usize);
        for color in 1..=rs.num_colors {
            let rules = rs.rules_for(color);
            let probs: Vec<Rational> =
                rules.iter().map(|r| r.probability.clone()).collect();
            samplers.push(DiscreteSampler::new(&probs));
            templates.push(
                rules
                    .iter()
                    .map(|rule| {
                        let mut slot_of = HashMap::new();
                        slot_of.insert(MARKER_A, Slot::Tail);
                        slot_of.insert(MARKER_B, Slot::Head);
                        let mut fresh = 0u32;
                        for label in &rule.network.nodes {
                            let label = label.as_str();
                            if label != MARKER_A && label != MARKER_B {
                                slot_of.insert(label, Slot::Fresh(fresh));
                                fresh += 1;
                            }
                        }
                        let arcs = rule
                            .network
                            .arcs
                            .iter()
                            .map(|(s, d, c)| ArcTemplate {
                                src: slot_of[s.as_str()],
                                dst: slot_of[d.as_str()],
                                color: *c,
                            })
                            .collect();
                        Template { fresh, arcs }
                    })
                    .collect(),
            );
        }
        CompiledRules {
            num_colors: rs.num_colors,
            samplers,
            templates,
        }
    }

    /// Number of arc colors.
    pub fn num_colors(&self) -> u8 {
        self.num_colors
    }
}

/// Runs one substitution round.
///
/// The rule picked for arc index `a` of round `t` comes from a counter RNG
/// keyed `(seed, t, a)`, so the output depends only on `(graph, rules, seed)`
/// and not on thread count. `arc_limit` bounds the size of the produced
/// graph; the check runs after rule choices are counted but before anything
/// is materialized.
pub fn substitute_step(
    g: &ColoredDigraph,
    rules: &CompiledRules,
    seed: u64,
    arc_limit: u64,
) -> Result<ColoredDigraph, GrowthError> {
    assert_eq!(
        g.num_colors, rules.num_colors,
        "graph and rules disagree on the number of colors"
    );
    let t = g.step;
    let choices: Vec<u32> = g
        .arcs
        .par_iter()
        .enumerate()
        .map(|(idx, arc)| {
            let mut rng = CounterRng::new(seed, domain::GENERATOR, t as u64, idx as u64);
            rules.samplers[arc.color as usize - 1].sample(&mut rng) as u32
        })
        .collect();

    let mut total_arcs: u128 = 0;
    let mut total_fresh: u128 = 0;
    let mut fresh_base = Vec::with_capacity(g.arcs.len());
    for (arc, &choice) in g.arcs.iter().zip(&choices) {
        let tpl = &rules.templates[arc.color as usize - 1][choice as usize];
        fresh_base.push(total_fresh);
        total_arcs += tpl.arcs.len() as u128;
        total_fresh += u128::from(tpl.fresh);
    }
    if total_arcs > u128::from(arc_limit) {
        return Err(GrowthError::ArcBudget {
            needed_arcs: total_arcs,
            limit_arcs: arc_limit,
        });
    }
    let old_nodes = g.birth.len() as u128;
    if old_nodes + total_fresh > u128::from(u32::MAX) {
        return Err(GrowthError::IdOverflow);
    }

    let first_fresh = old_nodes as u32;
    let pieces: Vec<Vec<Arc>> = g
        .arcs
        .par_iter()
        .zip(choices.par_iter())
        .zip(fresh_base.par_iter())
        .map(|((arc, &choice), &base)| {
            let tpl = &rules.templates[arc.color as usize - 1][choice as usize];
            let place = |slot: Slot| match slot {
                Slot::Tail => arc.src,
                Slot::Head => arc.dst,
                Slot::Fresh(k) => first_fresh + base as u32 + k,
            };
            tpl.arcs
                .iter()
                .map(|ta| Arc {
                    src: place(ta.src),
                    dst: place(ta.dst),
                    color: ta.color,
                })
                .collect()
        })
        .collect();

    let mut arcs = Vec::with_capacity(total_arcs as usize);
    for piece in pieces {
        arcs.extend(piece);
    }
    let mut birth = g.birth.clone();
    birth.resize(birth.len() + total_fresh as usize, t + 1);

    Ok(ColoredDigraph {
        step: t + 1,
        num_colors: g.num_colors,
        birth,
        arcs,
    })
}

/// Per-round sizes of a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepStats {
    /// Round index.
    pub t: u32,
    /// Node count.
    pub nodes: u64,
    /// Arc count.
    pub arcs: u64,
    /// Arc count per color.
    pub color_counts: Vec<u64>,
    /// Largest undirected degree.
    pub max_degree: u64,
}

/// Size snapshots for rounds `0..=t` of one run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationSummary {
    /// One entry per round, in order.
    pub steps: Vec<StepStats>,
}

impl GenerationSummary {
    /// CSV rendering, one row per round:
    /// `t,nodes,arcs,arcs_color_1,…,arcs_color_λ,max_degree`.
    pub fn to_csv(&self) -> String {
        let colors = self
            .steps
            .first()
            .map_or(0, |s| s.color_counts.len());
        let mut out = String::from("t,nodes,arcs");
        for c in 1..=colors {
            out.push_str(&format!(",arcs_color_{c}"));
        }
        out.push_str(",max_degree\n");
        for s in &self.steps {
            out.push_str(&format!("{},{},{}", s.t, s.nodes, s.arcs));
            for c in &s.color_counts {
                out.push_str(&format!(",{c}"));
            }
            out.push_str(&format!(",{}\n", s.max_degree));
        }
        out
    }
}

/// Expected arcs of the largest round, for budget pre-flights.
pub fn expected_final_arcs(rs: &RuleSet, init: &ColoredDigraph, t: u32) -> u128 {
    let chi0: Vec<Rational> = init
        .color_counts()
        .into_iter()
        .map(|c| Rational::from_integer(c.into()))
        .collect();
    let expected = expected_arc_count(rs, &chi0, t);
    rational_to_f64(&expected).ceil() as u128
}

/// Grows a graph for `t` rounds, recording sizes after every round.
///
/// Budget handling: a pre-flight compares the expected arc count of the
/// final round against `budget_bytes`, and each round re-checks its exact
/// size before materializing, so a run that would blow the budget fails
/// without allocating.
pub fn generate(
    rs: &RuleSet,
    init: &InitialGraph,
    t: u32,
    seed: u64,
    budget_bytes: u64,
) -> Result<(ColoredDigraph, GenerationSummary), GrowthError> {
    let mut g = ColoredDigraph::from_initial(init, rs.num_colors);
    let arc_limit = budget_bytes / BYTES_PER_ARC;
    let expected = expected_final_arcs(rs, &g, t);
    if expected > u128::from(arc_limit) {
        return Err(GrowthError::ArcBudget {
            needed_arcs: expected,
            limit_arcs: arc_limit,
        });
    }
    let rules = CompiledRules::compile(rs);
    let mut summary = GenerationSummary {
        steps: vec![g.stats()],
    };
    for _ in 0..t {
        g = substitute_step(&g, &rules, seed, arc_limit)?;
        summary.steps.push(g.stats());
    }
    Ok((g, summary))
}

/// Writes a graph as JSON lines: one `meta` line, then `node` lines in id
/// order, then `arc` lines in generation order.
pub fn write_graph_jsonl<W: Write>(g: &ColoredDigraph, mut w: W) -> io::Result<()> {
    writeln!(
        w,
        "{{\"type\":\"meta\",\"t\":{},\"num_colors\":{}}}",
        g.step, g.num_colors
    )?;
    for (id, birth) in g.birth.iter().enumerate() {
        writeln!(w, "{{\"type\":\"node\",\"id\":{id},\"birth\":{birth}}}")?;
    }
    for a in &g.arcs {
        writeln!(
            w,
            "{{\"type\":\"arc\",\"src\":{},\"dst\":{},\"color\":{}}}",
            a.src, a.dst, a.color
        )?;
    }
    Ok(())
}

/// [`write_graph_jsonl`] into a string.
pub fn graph_to_jsonl(g: &ColoredDigraph) -> String {
    let mut buf = Vec::new();
    write_graph_jsonl(g, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("the export is ASCII")
}

#[derive(Deserialize)]
#[serde(tag = "type")]
enum GraphLine {
    #[serde(rename = "meta")]
    Meta { t: u32, num_colors: u8 },
    #[serde(rename = "node")]
    Node { id: u64, birth: u32 },
    #[serde(rename = "arc")]
    Arc { src: u64, dst: u64, color: u8 },
}

/// Reads a graph from the JSON-lines format [`write_graph_jsonl`] produces.
///
/// The meta line must come first; node ids must be `0..n` in order; arcs
/// must reference declared nodes and in-range colors.
pub fn read_graph_jsonl<R: BufRead>(r: R) -> Result<ColoredDigraph, RulesError> {
    let bad = |msg: String| RulesError::MalformedFile(msg);
    let mut meta: Option<(u32, u8)> = None;
    let mut birth = Vec::new();
    let mut arcs = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line.map_err(|e| bad(format!("line {}: {e}", lineno + 1)))?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: GraphLine = serde_json::from_str(&line)
            .map_err(|e| bad(format!("line {}: {e}", lineno + 1)))?;
        match parsed {
            GraphLine::Meta { t, num_colors } => {
                if meta.is_some() {
                    return Err(bad("repeated meta line".into()));
                }
                if !birth.is_empty() || !arcs.is_empty() {
                    return Err(bad("meta line must come first".into()));
                }
                if num_colors == 0 {
                    return Err(bad("num_colors must be at least 1".into()));
                }
                meta = Some((t, num_colors));
            }
            GraphLine::Node { id, birth: b } => {
                if meta.is_none() {
                    return Err(bad("node line before meta".into()));
                }
                if id != birth.len() as u64 {
                    return Err(bad(format!(
                        "node ids must be consecutive from 0, got {id} at position {}",
                        birth.len()
                    )));
                }
                if id > u64::from(u32::MAX) {
                    return Err(bad("node id out of range".into()));
                }
                birth.push(b);
            }
            GraphLine::Arc { src, dst, color } => {
                let (_, num_colors) =
                    meta.ok_or_else(|| bad("arc line before meta".into()))?;
                let n = birth.len() as u64;
                if src >= n || dst >= n {
                    return Err(bad(format!(
                        "arc ({src},{dst}) references an undeclared node"
                    )));
                }
                if color == 0 || color > num_colors {
                    return Err(bad(format!("arc color {color} out of range")));
                }
                arcs.push(Arc {
                    src: src as u32,
                    dst: dst as u32,
                    color,
                });
            }
        }
    }
    let (step, num_colors) = meta.ok_or_else(|| bad("missing meta line".into()))?;
    if birth.is_empty() {
        return Err(RulesError::EmptyGraph);
    }
    Ok(ColoredDigraph {
        step,
        num_colors,
        birth,
        arcs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::trajectory;
    use crate::rng::trial_seed;
    use crate::rulesio::{parse_initial_graph, parse_ruleset, parse_ruleset_lenient};
    use crate::theory::{arc_process, expected_node_count};

    fn two_color() -> RuleSet {
        parse_ruleset(include_str!("../../../fixtures/two_color_rules.json")).unwrap()
    }

    fn two_color_init() -> InitialGraph {
        parse_initial_graph(include_str!("../../../fixtures/two_color_init.json"), 2).unwrap()
    }

    fn doubling_rules() -> RuleSet {
        parse_ruleset_lenient(
            r#"{"num_colors":1,"rules":{"1":[{"p":"1/1","nodes":["A","x","B"],"arcs":[["A","x",1],["x","B",1]]}]}}"#,
        )
        .unwrap()
    }

    fn single_arc_init() -> InitialGraph {
        parse_initial_graph(r#"{"nodes":["A","B"],"arcs":[["A","B",1]]}"#, 1).unwrap()
    }

    #[test]
    fn initial_graph_wrapping() {
        let g = ColoredDigraph::from_initial(&two_color_init(), 2);
        assert_eq!(g.step(), 0);
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.arc_count(), 1);
        assert_eq!(g.color_counts(), vec![1, 0]);
        assert_eq!(g.undirected_degrees(), vec![1, 1]);
        assert_eq!(g.births(), &[0, 0]);
    }

    #[test]
    fn self_loop_counts_twice_in_degree() {
        let init = parse_initial_graph(r#"{"nodes":["A"],"arcs":[["A","A",1]]}"#, 1).unwrap();
        let g = ColoredDigraph::from_initial(&init, 1);
        assert_eq!(g.undirected_degrees(), vec![2]);
        assert_eq!(g.max_degree(), 2);
    }

    // Finds a seed whose round-0 choice for arc 0 picks the given rule.
    fn seed_choosing(rules: &CompiledRules, color: u8, want: usize) -> u64 {
        (0..10_000u64)
            .find(|&s| {
                let mut rng = CounterRng::new(s, domain::GENERATOR, 0, 0);
                rules.samplers[color as usize - 1].sample(&mut rng) == want
            })
            .expect("a seed picking this rule exists")
    }

    #[test]
    fn first_round_with_first_rule_of_color_one() {
        // The 6-node replacement: markers plus 4 fresh nodes, 3 arcs of each
        // color, and no leftover original arc.
        let rs = two_color();
        let compiled = CompiledRules::compile(&rs);
        let seed = seed_choosing(&compiled, 1, 0);
        let g0 = ColoredDigraph::from_initial(&two_color_init(), 2);
        let g1 = substitute_step(&g0, &compiled, seed, u64::MAX).unwrap();
        assert_eq!(g1.step(), 1);
        assert_eq!(g1.node_count(), 6);
        assert_eq!(g1.arc_count(), 6);
        assert_eq!(g1.color_counts(), vec![3, 3]);
        assert_eq!(g1.births(), &[0, 0, 1, 1, 1, 1]);
        // Marker gluing: some arc must touch each original endpoint.
        assert!(g1.arcs().iter().any(|a| a.src == 0 || a.dst == 0));
        assert!(g1.arcs().iter().any(|a| a.src == 1 || a.dst == 1));
    }

    #[test]
    fn first_round_with_second_rule_of_color_one() {
        let rs = two_color();
        let compiled = CompiledRules::compile(&rs);
        let seed = seed_choosing(&compiled, 1, 1);
        let g0 = ColoredDigraph::from_initial(&two_color_init(), 2);
        let g1 = substitute_step(&g0, &compiled, seed, u64::MAX).unwrap();
        assert_eq!(g1.node_count(), 4);
        assert_eq!(g1.arc_count(), 3);
        assert_eq!(g1.color_counts(), vec![0, 3]);
    }

    #[test]
    fn deterministic_path_rule_doubles_arcs() {
        let rs = doubling_rules();
        let (g, summary) = generate(&rs, &single_arc_init(), 6, 7, u64::MAX / 2).unwrap();
        assert_eq!(g.arc_count(), 64);
        assert_eq!(g.node_count(), 65);
        for (t, s) in summary.steps.iter().enumerate() {
            assert_eq!(s.t, t as u32);
            assert_eq!(s.arcs, 1 << t);
            assert_eq!(s.nodes, (1 << t) + 1);
        }
    }

    #[test]
    fn self_loop_substitution_makes_a_cycle() {
        let rs = doubling_rules();
        let init = parse_initial_graph(r#"{"nodes":["A"],"arcs":[["A","A",1]]}"#, 1).unwrap();
        let g0 = ColoredDigraph::from_initial(&init, 1);
        let compiled = CompiledRules::compile(&rs);
        let g1 = substitute_step(&g0, &compiled, 0, u64::MAX).unwrap();
        // A→A becomes A→x→A.
        assert_eq!(g1.node_count(), 2);
        assert_eq!(
            g1.arcs(),
            &[
                Arc { src: 0, dst: 1, color: 1 },
                Arc { src: 1, dst: 0, color: 1 }
            ]
        );
    }

    #[test]
    fn identical_output_across_thread_counts() {
        let rs = two_color();
        let init = two_color_init();
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| generate(&rs, &init, 5, 42, u64::MAX / 2).unwrap())
        };
        let (g1, s1) = run(1);
        let (g4, s4) = run(4);
        assert_eq!(g1, g4);
        assert_eq!(s1, s4);
        assert_eq!(graph_to_jsonl(&g1), graph_to_jsonl(&g4));
    }

    #[test]
    fn jsonl_round_trip() {
        let rs = two_color();
        let (g, _) = generate(&rs, &two_color_init(), 3, 11, u64::MAX / 2).unwrap();
        let text = graph_to_jsonl(&g);
        let back = read_graph_jsonl(text.as_bytes()).unwrap();
        assert_eq!(g, back);
        assert!(text.starts_with(r#"{"type":"meta","t":3,"num_colors":2}"#));
    }

    #[test]
    fn jsonl_rejects_bad_input() {
        assert!(read_graph_jsonl("".as_bytes()).is_err());
        assert!(read_graph_jsonl(r#"{"type":"node","id":0,"birth":0}"#.as_bytes()).is_err());
        let text = "{\"type\":\"meta\",\"t\":0,\"num_colors\":1}\n{\"type\":\"node\",\"id\":0,\"birth\":0}\n{\"type\":\"arc\",\"src\":0,\"dst\":5,\"color\":1}\n";
        assert!(read_graph_jsonl(text.as_bytes()).is_err());
        let text = "{\"type\":\"meta\",\"t\":0,\"num_colors\":1}\n{\"type\":\"node\",\"id\":0,\"birth\":0}\n{\"type\":\"arc\",\"src\":0,\"dst\":0,\"color\":2}\n";
        assert!(read_graph_jsonl(text.as_bytes()).is_err());
    }

    #[test]
    fn budget_stops_before_materializing() {
        let rs = doubling_rules();
        // Pre-flight: expected 2^20 arcs over a tiny budget.
        let err = generate(&rs, &single_arc_init(), 20, 1, 1024).unwrap_err();
        match err {
            GrowthError::ArcBudget { needed_arcs, limit_arcs } => {
                assert_eq!(needed_arcs, 1 << 20);
                assert_eq!(limit_arcs, 1024 / BYTES_PER_ARC);
            }
            other => panic!("unexpected error {other:?}"),
        }
        // Step-level: exact count over the limit.
        let compiled = CompiledRules::compile(&rs);
        let g0 = ColoredDigraph::from_initial(&single_arc_init(), 1);
        let g1 = substitute_step(&g0, &compiled, 1, u64::MAX).unwrap();
        let err = substitute_step(&g1, &compiled, 1, 3).unwrap_err();
        assert_eq!(
            err,
            GrowthError::ArcBudget {
                needed_arcs: 4,
                limit_arcs: 3
            }
        );
    }

    #[test]
    fn monte_carlo_arc_counts_match_mean_matrix_power() {
        // (1,0)·M^3 = (31, 43.5) for the reference rules.
        let rs = two_color();
        let init = two_color_init();
        let trials = 1000u64;
        let mut sums = [0.0f64; 2];
        let mut sq = [0.0f64; 2];
        for trial in 0..trials {
            let (g, _) =
                generate(&rs, &init, 3, trial_seed(99, trial), u64::MAX / 2).unwrap();
            let chi = g.color_counts();
            for j in 0..2 {
                let x = chi[j] as f64;
                sums[j] += x;
                sq[j] += x * x;
            }
        }
        let target = [31.0, 43.5];
        for j in 0..2 {
            let mean = sums[j] / trials as f64;
            let var = (sq[j] - sums[j] * sums[j] / trials as f64) / (trials as f64 - 1.0);
            let se = (var / trials as f64).sqrt();
            assert!(
                (mean - target[j]).abs() <= 3.0 * se,
                "color {}: mean {mean}, target {}, se {se}",
                j + 1,
                target[j]
            );
        }
    }

    #[test]
    fn monte_carlo_node_counts_match_recursion() {
        let rs = two_color();
        let init = two_color_init();
        let chi0 = vec![
            Rational::from_integer(1.into()),
            Rational::from_integer(0.into()),
        ];
        let target = rational_to_f64(&expected_node_count(&rs, 2, &chi0, 3));
        let trials = 1000u64;
        let mut sum = 0.0;
        let mut sq = 0.0;
        for trial in 0..trials {
            let (g, _) =
                generate(&rs, &init, 3, trial_seed(123, trial), u64::MAX / 2).unwrap();
            let x = g.node_count() as f64;
            sum += x;
            sq += x * x;
        }
        let mean = sum / trials as f64;
        let var = (sq - sum * sum / trials as f64) / (trials as f64 - 1.0);
        let se = (var / trials as f64).sqrt();
        assert!(
            (mean - target).abs() <= 3.0 * se,
            "mean {mean}, target {target}, se {se}"
        );
    }

    #[test]
    fn arc_counts_distributed_like_branching_process() {
        // Same per-color means and variances as the counts-only process, up
        // to Monte-Carlo noise: the graph run and the process run use
        // unrelated RNG streams.
        let rs = two_color();
        let init = two_color_init();
        let spec = arc_process(&rs).unwrap();
        let trials = 1000u64;
        let t = 4u32;
        let mut graph_samples = vec![Vec::with_capacity(trials as usize); 2];
        let mut proc_samples = vec![Vec::with_capacity(trials as usize); 2];
        for trial in 0..trials {
            let (g, _) =
                generate(&rs, &init, t, trial_seed(7, trial), u64::MAX / 2).unwrap();
            let chi = g.color_counts();
            let traj =
                trajectory(&spec, &[1, 0], t as u64, trial_seed(8, trial)).unwrap();
            for j in 0..2 {
                graph_samples[j].push(chi[j] as f64);
                proc_samples[j].push(traj.final_alpha[j] as f64);
            }
        }
        for j in 0..2 {
            let stats = |xs: &[f64]| {
                let n = xs.len() as f64;
                let mean = xs.iter().sum::<f64>() / n;
                let var =
                    xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
                (mean, var)
            };
            let (mg, vg) = stats(&graph_samples[j]);
            let (mp, vp) = stats(&proc_samples[j]);
            let se = ((vg + vp) / trials as f64).sqrt();
            assert!(
                (mg - mp).abs() <= 3.0 * se,
                "color {}: graph mean {mg}, process mean {mp}, se {se}",
                j + 1
            );
            let ratio = vg / vp;
            assert!(
                (0.75..=4.0 / 3.0).contains(&ratio),
                "color {}: variance ratio {ratio}",
                j + 1
            );
        }
    }

    #[test]
    fn summary_csv_shape() {
        let rs = two_color();
        let (_, summary) = generate(&rs, &two_color_init(), 2, 5, u64::MAX / 2).unwrap();
        let csv = summary.to_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,nodes,arcs,arcs_color_1,arcs_color_2,max_degree"
        );
        assert_eq!(lines.next().unwrap(), "0,2,1,1,0,1");
        assert_eq!(csv.lines().count(), 4);
    }
}
