//! Command-line front end.
//!
//! Five subcommands bind the library into reproducible experiments:
//! `validate` checks a rule file, `analyze` prints its mean matrices and
//! predicted dimension, `simulate` grows a network, `estimate` fits the
//! degree dimension over several runs, and `process` runs the counts-only
//! branching process. Every command is deterministic given its full flag
//! set, including `--seed` and regardless of `--threads`.
//!
//! Exit codes: 0 success, 1 domain failure, 2 unreadable or malformed
//! input, 3 memory budget exceeded, 64 usage error.

use std::ffi::OsString;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::generator::{generate, write_graph_jsonl, GrowthError};
use crate::linalg::{RationalMatrix, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::process::{martingale_diagnostic, trajectory, ProcessError, ProcessSpec};
use crate::rng::trial_seed;
use crate::rulesio::{
    check_structural_conditions, parse_initial_graph, parse_probability, parse_ruleset,
    parse_ruleset_lenient, InitialGraph, RuleSet, RulesError,
};
use crate::stats::{degree_histogram, estimate_dimension, mean_and_sd, StatsError};
use crate::theory::{analyze_with, arc_process, degree_process, dimension_from_radii};

/// Success.
pub const EXIT_OK: i32 = 0;
/// Domain failure: failed validation, hypotheses, or arithmetic limits.
pub const EXIT_DOMAIN: i32 = 1;
/// Unreadable or malformed input file.
pub const EXIT_PARSE: i32 = 2;
/// The memory budget check refused the run.
pub const EXIT_BUDGET: i32 = 3;
/// Command-line usage error.
pub const EXIT_USAGE: i32 = 64;

const DEFAULT_BUDGET: u64 = 4 * 1024 * 1024 * 1024;

#[derive(Parser)]
#[command(
    name = "snet",
    version,
    about = "Grow and analyze random colored substitution networks",
    after_help = "Exit codes: 0 ok, 1 domain failure, 2 parse failure, 3 over budget, 64 usage."
)]
struct Cli {
    /// Worker threads (0 picks one per CPU).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a rule file: well-formedness and the two structural conditions.
    Validate {
        /// Rule file (JSON).
        rules: PathBuf,
        /// Report structural failures without failing the exit code.
        #[arg(long)]
        skip_structural: bool,
    },
    /// Print the mean matrices, spectral radii, and predicted dimension.
    Analyze {
        /// Rule file (JSON).
        rules: PathBuf,
        /// Emit JSON instead of text.
        #[arg(long)]
        json: bool,
        /// Reference radii "RHO_M,RHO_N" to print a comparison block.
        #[arg(long, value_name = "RHO_M,RHO_N")]
        compare: Option<String>,
        /// Power-iteration tolerance.
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Power-iteration cap.
        #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
        max_iter: usize,
    },
    /// Grow a network and write it as JSON lines.
    Simulate {
        #[command(flatten)]
        run: GrowthArgs,
        /// Output file for the graph; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Output file for the per-round size CSV.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Grow several networks and fit the degree dimension.
    Estimate {
        #[command(flatten)]
        run: GrowthArgs,
        /// Independent runs.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        runs: u64,
        /// Keep histogram bins with L at most this fraction of the maximal
        /// degree.
        #[arg(long, default_value_t = 1.0)]
        max_frac: f64,
        /// Prefix for per-run histogram CSVs and the fit JSONs; stdout
        /// summary only when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the counts-only branching process.
    Process {
        /// Rule file (JSON); menus come from the arc counts of its rules.
        #[arg(required_unless_present = "matrix", conflicts_with = "matrix")]
        rules: Option<PathBuf>,
        /// Process file (JSON) with explicit matrix menus.
        #[arg(long)]
        matrix: Option<PathBuf>,
        /// With a rule file: track endpoint degrees instead of arc counts.
        #[arg(long)]
        degree: bool,
        /// Initial counts, comma-separated; defaults to 1,0,…,0.
        #[arg(long)]
        alpha0: Option<String>,
        /// Steps to run.
        #[arg(long)]
        steps: u64,
        /// Trials (martingale mode, and extra trajectories otherwise).
        #[arg(long, default_value_t = 1)]
        trials: u64,
        /// RNG seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Emit per-step martingale mean and variance instead of
        /// trajectories.
        #[arg(long)]
        martingale: bool,
        /// Output CSV file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Accept rule files that fail the structural conditions.
        #[arg(long)]
        skip_structural: bool,
    },
}

/// Flags shared by the growing commands.
#[derive(Args)]
struct GrowthArgs {
    /// Rule file (JSON).
    rules: PathBuf,
    /// Initial graph file (JSON).
    init: PathBuf,
    /// Substitution rounds.
    #[arg(long)]
    steps: u32,
    /// RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Memory budget in bytes for the grown graph.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Accept rule files that fail the structural conditions.
    #[arg(long)]
    skip_structural: bool,
}

struct Failure {
    code: i32,
    msg: String,
}

impl Failure {
    fn new(code: i32, msg: impl Into<String>) -> Self {
        Failure {
            code,
            msg: msg.into(),
        }
    }
}

impl From<RulesError> for Failure {
    fn from(e: RulesError) -> Self {
        let code = match e {
            RulesError::MalformedFile(_) => EXIT_PARSE,
            _ => EXIT_DOMAIN,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<GrowthError> for Failure {
    fn from(e: GrowthError) -> Self {
        let code = match e {
            GrowthError::ArcBudget { .. } => EXIT_BUDGET,
            GrowthError::IdOverflow => EXIT_DOMAIN,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<ProcessError> for Failure {
    fn from(e: ProcessError) -> Self {
        Failure::new(EXIT_DOMAIN, e.to_string())
    }
}

/// Parses arguments and runs one command, returning the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
    {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("cannot build a thread pool: {e}");
            return EXIT_DOMAIN;
        }
    };
    match pool.install(|| dispatch(cli.command)) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            f.code
        }
    }
}

fn dispatch(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Validate {
            rules,
            skip_structural,
        } => cmd_validate(&rules, skip_structural),
        Command::Analyze {
            rules,
            json,
            compare,
            tol,
            max_iter,
        } => cmd_analyze(&rules, json, compare.as_deref(), tol, max_iter),
        Command::Simulate { run, out, summary } => {
            cmd_simulate(&run, out.as_deref(), summary.as_deref())
        }
        Command::Estimate {
            run,
            runs,
            max_frac,
            out,
        } => cmd_estimate(&run, runs, max_frac, out.as_deref()),
        Command::Process {
            rules,
            matrix,
            degree,
            alpha0,
            steps,
            trials,
            seed,
            martingale,
            out,
            skip_structural,
        } => cmd_process(ProcessConfig {
            rules,
            matrix,
            degree,
            alpha0,
            steps,
            trials,
            seed,
            martingale,
            out,
            skip_structural,
        }),
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_PARSE, format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, content: &str) -> Result<(), Failure> {
    fs::write(path, content)
        .map_err(|e| Failure::new(EXIT_DOMAIN, format!("cannot write {}: {e}", path.display())))
}

fn load_rules(path: &Path, skip_structural: bool) -> Result<RuleSet, Failure> {
    let text = read_file(path)?;
    let parsed = if skip_structural {
        parse_ruleset_lenient(&text)
    } else {
        parse_ruleset(&text)
    };
    Ok(parsed?)
}

fn load_init(path: &Path, num_colors: u8) -> Result<InitialGraph, Failure> {
    let text = read_file(path)?;
    Ok(parse_initial_graph(&text, num_colors)?)
}

fn cmd_validate(rules_path: &Path, skip_structural: bool) -> Result<(), Failure> {
    let rs = load_rules(rules_path, true)?;
    let reports = check_structural_conditions(&rs);
    let witness = |w: Option<usize>| match w {
        Some(k) => format!("witness rule {}", k + 1),
        None => "no witness".into(),
    };
    for r in &reports {
        println!(
            "color {}: condition (a) {} ({}), condition (b) {} ({})",
            r.color,
            if r.condition_a { "ok" } else { "FAILED" },
            witness(r.witness_a),
            if r.condition_b { "ok" } else { "FAILED" },
            witness(r.witness_b),
        );
    }
    let all_ok = reports.iter().all(|r| r.condition_a && r.condition_b);
    if all_ok {
        let colors: Vec<String> = reports.iter().map(|r| r.color.to_string()).collect();
        println!(
            "conditions (a),(b) satisfied for colors {}",
            colors.join(",")
        );
        Ok(())
    } else if skip_structural {
        println!("structural failures ignored (--skip-structural)");
        Ok(())
    } else {
        Err(Failure::new(
            EXIT_DOMAIN,
            "structural conditions failed; see report above",
        ))
    }
}

fn cmd_analyze(
    rules_path: &Path,
    json: bool,
    compare: Option<&str>,
    tol: f64,
    max_iter: usize,
) -> Result<(), Failure> {
    let rs = load_rules(rules_path, true)?;
    let reference = compare.map(parse_compare).transpose()?;
    let (report, failed) = match analyze_with(&rs, tol, max_iter) {
        Ok(report) => (report, Vec::new()),
        Err(hf) => (hf.report, hf.failed),
    };
    if json {
        let mut v = report.to_json();
        v["failed_hypotheses"] = serde_json::json!(failed);
        if let Some((rm, rn)) = reference {
            v["comparison"] = serde_json::json!({
                "rho_m": rm,
                "rho_n": rn,
                "degree_dimension": dimension_from_radii(rm, rn),
            });
        }
        println!("{}", serde_json::to_string_pretty(&v).expect("valid JSON"));
    } else {
        println!("{report}");
        if let Some((rm, rn)) = reference {
            println!("reference comparison:");
            println!("  rho(M) reference = {rm}");
            println!("  rho(N) reference = {rn}");
            println!(
                "  dimension from reference radii = {:.6}",
                dimension_from_radii(rm, rn)
            );
            if let Some(d) = report.degree_dimension {
                println!("  dimension from derived matrices = {d:.6}");
            }
        }
        if !failed.is_empty() {
            println!("hypotheses failed: {}", failed.join(", "));
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::new(
            EXIT_DOMAIN,
            format!("hypotheses failed: {}", failed.join(", ")),
        ))
    }
}

fn parse_compare(text: &str) -> Result<(f64, f64), Failure> {
    let bad = || {
        Failure::new(
            EXIT_USAGE,
            format!("--compare wants \"RHO_M,RHO_N\", got {text:?}"),
        )
    };
    let (m, n) = text.split_once(',').ok_or_else(bad)?;
    let rm: f64 = m.trim().parse().map_err(|_| bad())?;
    let rn: f64 = n.trim().parse().map_err(|_| bad())?;
    if !(rm > 0.0 && rn > 0.0 && rn != 1.0) {
        return Err(Failure::new(
            EXIT_USAGE,
            "--compare radii must be positive and RHO_N must not be 1",
        ));
    }
    Ok((rm, rn))
}

fn cmd_simulate(
    run: &GrowthArgs,
    out: Option<&Path>,
    summary: Option<&Path>,
) -> Result<(), Failure> {
    let rs = load_rules(&run.rules, run.skip_structural)?;
    let init = load_init(&run.init, rs.num_colors)?;
    let (graph, sizes) = generate(&rs, &init, run.steps, run.seed, run.budget)?;
    match out {
        Some(path) => {
            let file = fs::File::create(path).map_err(|e| {
                Failure::new(EXIT_DOMAIN, format!("cannot write {}: {e}", path.display()))
            })?;
            let mut w = BufWriter::new(file);
            write_graph_jsonl(&graph, &mut w)
                .and_then(|()| w.flush())
                .map_err(|e| {
                    Failure::new(EXIT_DOMAIN, format!("cannot write {}: {e}", path.display()))
                })?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            write_graph_jsonl(&graph, &mut w)
                .and_then(|()| w.flush())
                .map_err(|e| Failure::new(EXIT_DOMAIN, format!("cannot write graph: {e}")))?;
        }
    }
    if let Some(path) = summary {
        write_file(path, &sizes.to_csv())?;
    }
    let last = sizes.steps.last().expect("at least round 0 is recorded");
    eprintln!(
        "t={} nodes={} arcs={} max_degree={}",
        last.t, last.nodes, last.arcs, last.max_degree
    );
    Ok(())
}

fn cmd_estimate(
    run: &GrowthArgs,
    runs: u64,
    max_frac: f64,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let rs = load_rules(&run.rules, run.skip_structural)?;
    let init = load_init(&run.init, rs.num_colors)?;
    let theoretical = match analyze_with(&rs, DEFAULT_TOL, DEFAULT_MAX_ITER) {
        Ok(report) => report.degree_dimension,
        Err(hf) => hf.report.degree_dimension,
    };
    let mut deltas = Vec::new();
    for r in 0..runs {
        let seed = trial_seed(run.seed, r);
        let (graph, _) = generate(&rs, &init, run.steps, seed, run.budget)?;
        let hist = degree_histogram(&graph);
        if let Some(prefix) = out {
            write_file(&suffixed(prefix, &format!(".run{r}.csv")), &hist.to_csv())?;
        }
        match estimate_dimension(&hist, max_frac) {
            Ok(fit) => {
                println!(
                    "run {r}: delta_hat = {:.6} (r^2 = {:.4}, {} bins)",
                    fit.delta_hat,
                    fit.r_squared,
                    fit.raw_points.len()
                );
                if let Some(prefix) = out {
                    let text = serde_json::to_string_pretty(&fit.to_json())
                        .expect("valid JSON");
                    write_file(&suffixed(prefix, &format!(".run{r}.json")), &text)?;
                }
                deltas.push(fit.delta_hat);
            }
            Err(e @ StatsError::InsufficientBins { .. }) => {
                println!("run {r}: skipped ({e})");
            }
            Err(e) => return Err(Failure::new(EXIT_DOMAIN, e.to_string())),
        }
    }
    if deltas.is_empty() {
        return Err(Failure::new(
            EXIT_DOMAIN,
            "no run produced enough histogram bins to fit",
        ));
    }
    let (mean, sd) = mean_and_sd(&deltas);
    match theoretical {
        Some(d) => println!(
            "estimated dimension: {mean:.4} +/- {sd:.4} over {} runs (theory: {d:.4})",
            deltas.len()
        ),
        None => println!(
            "estimated dimension: {mean:.4} +/- {sd:.4} over {} runs (theory: n/a)",
            deltas.len()
        ),
    }
    if let Some(prefix) = out {
        let v = serde_json::json!({
            "delta_hats": deltas,
            "mean": mean,
            "sd": sd,
            "theoretical": theoretical,
            "runs": runs,
            "steps": run.steps,
            "max_frac": max_frac,
        });
        write_file(
            &suffixed(prefix, ".aggregate.json"),
            &serde_json::to_string_pretty(&v).expect("valid JSON"),
        )?;
    }
    Ok(())
}

fn suffixed(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_os_string();
    name.push(suffix);
    PathBuf::from(name)
}

struct ProcessConfig {
    rules: Option<PathBuf>,
    matrix: Option<PathBuf>,
    degree: bool,
    alpha0: Option<String>,
    steps: u64,
    trials: u64,
    seed: u64,
    martingale: bool,
    out: Option<PathBuf>,
    skip_structural: bool,
}

#[derive(Deserialize)]
struct MatrixFileJson {
    matrices: Vec<MatrixEntryJson>,
}

#[derive(Deserialize)]
struct MatrixEntryJson {
    p: String,
    rows: Vec<Vec<u64>>,
}

fn load_matrix_spec(path: &Path) -> Result<ProcessSpec, Failure> {
    let text = read_file(path)?;
    let parsed: MatrixFileJson = serde_json::from_str(&text)
        .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))?;
    let mut probs = Vec::with_capacity(parsed.matrices.len());
    let mut mats = Vec::with_capacity(parsed.matrices.len());
    for entry in &parsed.matrices {
        probs.push(parse_probability(&entry.p)?);
        let rows: Vec<Vec<crate::linalg::Rational>> = entry
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&v| crate::linalg::Rational::from_integer(v.into()))
                    .collect()
            })
            .collect();
        if rows.is_empty() || rows.iter().any(|r| r.len() != rows.len()) {
            return Err(Failure::new(
                EXIT_PARSE,
                format!("{}: matrices must be square and nonempty", path.display()),
            ));
        }
        mats.push(RationalMatrix::from_rows(rows));
    }
    Ok(ProcessSpec::from_components(&probs, &mats)?)
}

fn parse_alpha0(text: Option<&str>, dim: usize) -> Result<Vec<u128>, Failure> {
    match text {
        None => {
            let mut alpha = vec![0u128; dim];
            alpha[0] = 1;
            Ok(alpha)
        }
        Some(t) => {
            let alpha: Result<Vec<u128>, _> =
                t.split(',').map(|s| s.trim().parse::<u128>()).collect();
            let alpha = alpha.map_err(|_| {
                Failure::new(
                    EXIT_USAGE,
                    format!("--alpha0 wants comma-separated nonnegative integers, got {t:?}"),
                )
            })?;
            if alpha.len() != dim {
                return Err(Failure::new(
                    EXIT_USAGE,
                    format!(
                        "--alpha0 has {} entries, the process has dimension {dim}",
                        alpha.len()
                    ),
                ));
            }
            Ok(alpha)
        }
    }
}

fn cmd_process(cfg: ProcessConfig) -> Result<(), Failure> {
    let spec = match (&cfg.rules, &cfg.matrix) {
        (Some(path), None) => {
            let rs = load_rules(path, cfg.skip_structural)?;
            if cfg.degree {
                degree_process(&rs)?
            } else {
                arc_process(&rs)?
            }
        }
        (None, Some(path)) => load_matrix_spec(path)?,
        _ => unreachable!("clap enforces exactly one input"),
    };
    let alpha0 = parse_alpha0(cfg.alpha0.as_deref(), spec.dim())?;
    let output = if cfg.martingale {
        let diag = martingale_diagnostic(&spec, &alpha0, cfg.steps, cfg.trials, cfg.seed)?;
        diag.to_csv()
    } else if cfg.trials == 1 {
        trajectory(&spec, &alpha0, cfg.steps, cfg.seed)?.to_csv()
    } else {
        let mut out = String::from("trial,t,xi,log_xi\n");
        for trial in 0..cfg.trials {
            let traj = trajectory(&spec, &alpha0, cfg.steps, trial_seed(cfg.seed, trial))?;
            for (t, &xi) in traj.xi.iter().enumerate() {
                out.push_str(&format!("{trial},{t},{xi},{}\n", (xi as f64).ln()));
            }
        }
        out
    };
    match &cfg.out {
        Some(path) => write_file(path, &output)?,
        None => print!("{output}"),
    }
    Ok(())
}
