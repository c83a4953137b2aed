mod config;

use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use ccroll::graph::{ObjectiveKind, SignedGraph};
use ccroll::harness::{
    generate, verify_all, verify_instance, GenModel, GenSpec, VerifyOptions, VerifyReport,
};
use ccroll::io::{read_graph, write_graph};
use ccroll::reduction::{run_trials, ReductionConfig, TrialSummary};
use ccroll::roll::{build_roll, valid_roll_size, RolledGraph};
use ccroll::rounding::{round_graph, RoundingOutcome, RoundingParams};
use ccroll::seed::derive;
use ccroll::solvers::{solve, SolverKind, SolverSpec};
use ccroll::weight::{format_weight, int, parse_weight, to_f64, Weight};
use ccroll::{normalize_weights, Execution};
use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "ccroll",
    version,
    about = "Roll-and-round reductions for weighted correlation clustering"
)]
#[command(args_override_self = true)]
struct Cli {
    /// Root seed; every random stream is derived from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// File of `key = value` lines mirroring the flags; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Run every stage on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Generate a random instance in the graph text format.
    Gen(GenArgs),
    /// Build the N-fold roll of a graph.
    Roll(RollArgs),
    /// Randomly round a normalized graph to weights in {-alpha, 0, beta}.
    Round(RoundArgs),
    /// Solve a correlation clustering instance.
    Solve(SolveArgs),
    /// Run roll, round and solve trials and report candidate quality.
    Reduce(ReduceArgs),
    /// Run the invariant suites.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModelName {
    Planted,
    Uniform,
    Complete,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value = "uniform")]
    model: ModelName,
    /// Planted cluster count.
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 0.1)]
    flip_prob: f64,
    #[arg(long, default_value_t = 1.0)]
    density: f64,
    #[arg(long, default_value_t = 10)]
    denominator_bound: u32,
    #[arg(long, default_value_t = 0.5)]
    plus_prob: f64,
}

#[derive(Args, Debug)]
struct RollArgs {
    /// Graph file, or `-` for stdin.
    input: PathBuf,
    /// Roll height N.
    #[arg(long, conflicts_with = "t", required_unless_present = "t")]
    rows: Option<usize>,
    /// Roll parameter; N = n(1 + t(n - 1)).
    #[arg(long)]
    t: Option<usize>,
    /// Sidecar JSON path (defaults to `<out>.json` when --out is given).
    #[arg(long)]
    sidecar: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RoundArgs {
    input: PathBuf,
    #[arg(long, value_parser = weight_arg, default_value = "1")]
    alpha: Weight,
    #[arg(long, value_parser = weight_arg, default_value = "1")]
    beta: Weight,
    /// Divide all weights by the largest |w| before rounding.
    #[arg(long)]
    normalize: bool,
    #[arg(long)]
    sidecar: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    input: PathBuf,
    #[arg(long, default_value = "exact")]
    solver: SolverKind,
    #[arg(long, default_value = "max")]
    objective: ObjectiveKind,
    /// Move budget for local search.
    #[arg(long, default_value_t = SolverSpec::DEFAULT_BUDGET)]
    budget: usize,
}

#[derive(Args, Debug)]
struct ReduceArgs {
    input: PathBuf,
    #[arg(long, default_value = "max")]
    objective: ObjectiveKind,
    #[arg(long, default_value_t = 0)]
    t: usize,
    #[arg(long, value_parser = weight_arg, default_value = "1")]
    alpha: Weight,
    #[arg(long, value_parser = weight_arg, default_value = "1")]
    beta: Weight,
    #[arg(long, value_parser = weight_arg, default_value = "1/20")]
    epsilon: Weight,
    /// Reference approximation factor for the bad event.
    #[arg(long, value_parser = weight_arg, default_value = "1")]
    lambda: Weight,
    #[arg(long, default_value = "exact")]
    solver: SolverKind,
    #[arg(long, default_value_t = SolverSpec::DEFAULT_BUDGET)]
    budget: usize,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long)]
    normalize: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Check a single graph instead of generated instances.
    input: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_values_t = [3, 4, 5])]
    sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [0, 1])]
    ts: Vec<usize>,
    /// Random instances per (n, t).
    #[arg(long, default_value_t = 4)]
    instances: usize,
    /// Random clusterings per instance.
    #[arg(long, default_value_t = 4)]
    clusterings: usize,
    /// Samples per distribution in the unbiasedness check.
    #[arg(long, default_value_t = 20_000)]
    samples: usize,
}

fn weight_arg(s: &str) -> std::result::Result<Weight, String> {
    parse_weight(s).ok_or_else(|| format!("not a rational number: {s:?}"))
}

struct Ctx {
    seed: u64,
    out: Option<PathBuf>,
    format: Option<Format>,
    exec: Execution,
}

impl Ctx {
    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
            None => {
                std::io::stdout().write_all(text.as_bytes())?;
                Ok(())
            }
        }
    }

    fn sidecar_path(&self, explicit: &Option<PathBuf>) -> Option<PathBuf> {
        explicit.clone().or_else(|| {
            self.out.as_ref().map(|p| {
                let mut s = p.as_os_str().to_owned();
                s.push(".json");
                PathBuf::from(s)
            })
        })
    }

    fn json_only(&self, what: &str) -> Result<()> {
        if self.format == Some(Format::Csv) {
            bail!("{what} has no CSV form; use --format json");
        }
        Ok(())
    }
}

fn read_input(path: &Path) -> Result<SignedGraph> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    };
    read_graph(&text).with_context(|| format!("parsing {}", path.display()))
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn cmd_gen(ctx: &Ctx, a: &GenArgs) -> Result<ExitCode> {
    let model = match a.model {
        ModelName::Planted => GenModel::PlantedPartition {
            k: a.k,
            flip_prob: a.flip_prob,
        },
        ModelName::Uniform => GenModel::UniformRational {
            density: a.density,
            denominator_bound: a.denominator_bound,
        },
        ModelName::Complete => GenModel::CompleteSigned {
            plus_prob: a.plus_prob,
        },
    };
    let g = generate(&GenSpec {
        n: a.n,
        model,
        seed: derive(ctx.seed, "generation", 0),
    })?;
    ctx.emit(&write_graph(&g))?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct ActiveDuplicate {
    position: usize,
    start: usize,
    slope: usize,
    /// Grid node (row * n + col) hosting each base node.
    nodes: Vec<usize>,
}

#[derive(Serialize)]
struct RollSidecar {
    n: usize,
    rows: usize,
    grid_nodes: usize,
    duplicates_total: usize,
    active: Vec<ActiveDuplicate>,
}

fn roll_sidecar(r: &RolledGraph) -> RollSidecar {
    let shape = r.shape();
    RollSidecar {
        n: shape.n(),
        rows: shape.rows(),
        grid_nodes: shape.grid_size(),
        duplicates_total: shape.duplicate_count(),
        active: r
            .active()
            .iter()
            .enumerate()
            .map(|(position, d)| ActiveDuplicate {
                position,
                start: d.start,
                slope: d.slope,
                nodes: (0..shape.n())
                    .map(|c| shape.index(d.node(shape.rows(), c)))
                    .collect(),
            })
            .collect(),
    }
}

fn cmd_roll(ctx: &Ctx, a: &RollArgs) -> Result<ExitCode> {
    let g = read_input(&a.input)?;
    let rows = match (a.rows, a.t) {
        (Some(r), _) => r,
        (None, Some(t)) => valid_roll_size(g.node_count(), t)?,
        (None, None) => bail!("one of --rows or --t is required"),
    };
    let rolled = build_roll(&g, rows, ctx.exec)?;
    ctx.emit(&write_graph(rolled.graph()))?;
    if let Some(p) = ctx.sidecar_path(&a.sidecar) {
        fs::write(&p, to_json(&roll_sidecar(&rolled))?)
            .with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct ClassReport {
    gamma: String,
    count: usize,
    rounded_to_zero: usize,
    /// Mean rounded weight, exact.
    mean: String,
    mean_f64: f64,
}

#[derive(Serialize)]
struct RoundSidecar {
    alpha: String,
    beta: String,
    seed: u64,
    scale: Option<String>,
    classes: Vec<ClassReport>,
}

fn round_sidecar(out: &RoundingOutcome, scale: Option<&Weight>) -> RoundSidecar {
    let mut classes: BTreeMap<Weight, (usize, usize, Weight)> = BTreeMap::new();
    for (u, v, w) in out.before.edges() {
        let after = out.after.weight(u, v);
        let e = classes.entry(w.clone()).or_insert((0, 0, int(0)));
        e.0 += 1;
        e.1 += usize::from(after == int(0));
        e.2 += after;
    }
    RoundSidecar {
        alpha: format_weight(out.params.alpha()),
        beta: format_weight(out.params.beta()),
        seed: out.params.seed(),
        scale: scale.map(format_weight),
        classes: classes
            .into_iter()
            .map(|(gamma, (count, zero, sum))| {
                let mean = sum / int(count as i64);
                ClassReport {
                    gamma: format_weight(&gamma),
                    count,
                    rounded_to_zero: zero,
                    mean_f64: to_f64(&mean),
                    mean: format_weight(&mean),
                }
            })
            .collect(),
    }
}

fn cmd_round(ctx: &Ctx, a: &RoundArgs) -> Result<ExitCode> {
    let mut g = read_input(&a.input)?;
    let mut scale = None;
    if a.normalize {
        let n = normalize_weights(&g);
        g = n.graph;
        scale = n.scale;
    }
    let params = RoundingParams::new(
        a.alpha.clone(),
        a.beta.clone(),
        derive(ctx.seed, "rounding", 0),
    )?;
    let out = round_graph(&g, &params, ctx.exec)
        .context("rounding needs |w| <= 1; pass --normalize to rescale")?;
    ctx.emit(&write_graph(&out.after))?;
    if let Some(p) = ctx.sidecar_path(&a.sidecar) {
        fs::write(&p, to_json(&round_sidecar(&out, scale.as_ref()))?)
            .with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_solve(ctx: &Ctx, a: &SolveArgs) -> Result<ExitCode> {
    ctx.json_only("solve")?;
    let g = read_input(&a.input)?;
    let spec = SolverSpec::new(a.solver)
        .with_seed(derive(ctx.seed, "solver", 0))
        .with_budget(a.budget);
    let result = solve(&g, a.objective, spec)?;
    match ctx.format {
        Some(Format::Json) => ctx.emit(&to_json(&result)?)?,
        _ => ctx.emit(&format!(
            "{}\n{}\n",
            result.clustering,
            format_weight(&result.value)
        ))?,
    }
    Ok(ExitCode::SUCCESS)
}

fn histogram_csv(s: &TrialSummary) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["lo", "hi", "count"])?;
    for b in &s.aggregate.ratio_histogram {
        w.write_record([b.lo.to_string(), b.hi.to_string(), b.count.to_string()])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn cmd_reduce(ctx: &Ctx, a: &ReduceArgs) -> Result<ExitCode> {
    let mut g = read_input(&a.input)?;
    if a.normalize {
        g = normalize_weights(&g).graph;
    }
    let cfg = ReductionConfig {
        objective: a.objective,
        t: a.t,
        rounding: RoundingParams::new(
            a.alpha.clone(),
            a.beta.clone(),
            derive(ctx.seed, "rounding", 0),
        )?,
        solver: SolverSpec::new(a.solver)
            .with_seed(derive(ctx.seed, "solver", 0))
            .with_budget(a.budget),
        epsilon: a.epsilon.clone(),
        lambda_ref: a.lambda.clone(),
    };
    let summary = run_trials(&g, &cfg, a.trials, ctx.exec)?;
    let grid = int((summary.rows * g.node_count()) as i64);
    let spread = &a.alpha + &a.beta;
    if &spread * &spread > grid {
        eprintln!("warning: alpha + beta exceeds sqrt(N n); the rolled instance is outside the reduction's weight range");
    }
    if summary.opt_below_one {
        eprintln!("warning: OPT < 1; the gap argument assumes an optimum of at least 1");
    }
    match ctx.format {
        Some(Format::Csv) => ctx.emit(&histogram_csv(&summary)?)?,
        _ => ctx.emit(&to_json(&summary)?)?,
    }
    let failures = summary.aggregate.accounting_failures;
    if failures > 0 {
        eprintln!("{failures} trial(s) failed candidate accounting");
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn verify_csv(r: &VerifyReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["check", "instances_run", "failures", "worst_case_detail"])?;
    for (name, c) in &r.checks {
        w.write_record([
            name.clone(),
            c.instances_run.to_string(),
            c.failures.to_string(),
            c.worst_case_detail.clone().unwrap_or_default(),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn cmd_verify(ctx: &Ctx, a: &VerifyArgs) -> Result<ExitCode> {
    let report = match &a.input {
        Some(path) => {
            let g = read_input(path)?;
            let mut report = VerifyReport::default();
            for &t in &a.ts {
                for (name, outcome) in
                    verify_instance(&g, t, derive(ctx.seed, "verify", t as u64), a.clusterings)
                {
                    report.record(name, outcome);
                }
            }
            report
        }
        None => verify_all(
            &VerifyOptions {
                seed: ctx.seed,
                sizes: a.sizes.clone(),
                ts: a.ts.clone(),
                instances: a.instances,
                clusterings: a.clusterings,
                rounding_samples: a.samples,
            },
            ctx.exec,
        ),
    };
    match ctx.format {
        Some(Format::Csv) => ctx.emit(&verify_csv(&report)?)?,
        _ => ctx.emit(&to_json(&report)?)?,
    }
    if report.passed() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("{} check failure(s)", report.failures());
        Ok(ExitCode::from(1))
    }
}

fn run() -> Result<ExitCode> {
    let command = Cli::command();
    let args = config::merge(&command, std::env::args_os().collect())?;
    let matches = command
        .try_get_matches_from(args)
        .unwrap_or_else(|e| e.exit());
    let cli = Cli::from_arg_matches(&matches)?;
    let ctx = Ctx {
        seed: cli.seed,
        out: cli.out,
        format: cli.format,
        exec: if cli.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        },
    };
    match &cli.command {
        Cmd::Gen(a) => {
            ctx.json_only("gen")?;
            cmd_gen(&ctx, a)
        }
        Cmd::Roll(a) => cmd_roll(&ctx, a),
        Cmd::Round(a) => cmd_round(&ctx, a),
        Cmd::Solve(a) => cmd_solve(&ctx, a),
        Cmd::Reduce(a) => cmd_reduce(&ctx, a),
        Cmd::Verify(a) => cmd_verify(&ctx, a),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
