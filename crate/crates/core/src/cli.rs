//! The `chansel` command line: argument parsing, evaluator wiring and
//! result documents.
//!
//! Exit codes: 0 success, 1 error, 2 no feasible subset.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::evaluators::{
    train_centroid, ExternalEvaluator, ExternalEvaluatorConfig, PerformanceFunction,
    SyntheticMonotoneFunction, TableOracle,
};
use crate::ingest::{load_csv, windowed_features, DatasetDescriptor, SplitSpec, WindowedFeatureSet};
use crate::model::{load_cost_csv, ChannelNames, CostModel, Direction, EvaluatedSubset, ScoreParams};
use crate::search::{
    alpha_sweep, branch_and_bound, exhaustive_search, greedy_select, write_sweep_csv,
    write_trace_jsonl, BnbOptions,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "chansel", version, about = "Minimum-cost sensor channel subset selection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Branch and bound: minimum-cost subset meeting the performance bound.
    Bnb(RunArgs),
    /// Greedy backward descent by α-balanced score.
    Greedy(RunArgs),
    /// Evaluate every nonempty subset (at most 20 channels).
    Exhaustive(RunArgs),
    /// Greedy runs over a grid of α values; writes CSV.
    AlphaSweep(SweepArgs),
    /// Evaluate one named subset.
    EvalSubset(EvalArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectionArg {
    Maximize,
    Minimize,
}

impl From<DirectionArg> for Direction {
    fn from(value: DirectionArg) -> Self {
        match value {
            DirectionArg::Maximize => Direction::Maximize,
            DirectionArg::Minimize => Direction::Minimize,
        }
    }
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct RunArgs {
    /// synthetic | centroid | table:<path> | external:<command line>
    #[arg(long)]
    pub evaluator: String,
    /// Channel count for the synthetic evaluator.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.05)]
    pub utility_min: f64,
    #[arg(long, default_value_t = 0.5)]
    pub utility_max: f64,
    /// Dataset descriptor JSON (centroid evaluator).
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Time-series CSV files; each one is a segment.
    #[arg(long, num_args = 1..)]
    pub data: Vec<PathBuf>,
    /// `equal` or a `channel,raw_cost` CSV.
    #[arg(long, default_value = "equal")]
    pub costs: String,
    /// Comma-separated channel names when the evaluator does not define them.
    #[arg(long, value_delimiter = ',')]
    pub channel_names: Vec<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = DirectionArg::Maximize)]
    pub direction: DirectionArg,
    /// Declare the table or external evaluator monotone.
    #[arg(long)]
    pub monotone: bool,
    #[arg(long, default_value = "")]
    pub task: String,
    #[arg(long, default_value_t = 300.0)]
    pub timeout_secs: f64,
    #[arg(long, default_value_t = 0.7)]
    pub split_fraction: f64,
    #[arg(long, default_value_t = 0)]
    pub split_seed: u64,
    /// Test segments for the centroid split; overrides --split-fraction.
    #[arg(long, value_delimiter = ',')]
    pub test_segments: Vec<usize>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Write the branch-and-bound node log as JSON lines.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Omit the timestamp so identical runs give identical bytes.
    #[arg(long)]
    pub deterministic: bool,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunArgs,
    /// Comma list (`0.1,0.5`) or range `start:stop:step`.
    #[arg(long, default_value = "0.1:0.9:0.1")]
    pub alphas: String,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct EvalArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunArgs,
    /// Comma-separated channel names.
    #[arg(long, value_delimiter = ',', required = true)]
    pub subset: Vec<String>,
}

/// Parse `0.1,0.2` or `start:stop:step` (inclusive, values rounded to 12 decimals).
pub fn parse_alpha_grid(spec: &str) -> Result<Vec<f64>> {
    let alphas: Vec<f64> = if let Some((start, rest)) = spec.split_once(':') {
        let (stop, step) = rest
            .split_once(':')
            .ok_or_else(|| anyhow!("range must be start:stop:step, got {spec:?}"))?;
        let (start, stop, step): (f64, f64, f64) = (start.trim().parse()?, stop.trim().parse()?, step.trim().parse()?);
        if step.is_nan() || step <= 0.0 || stop < start {
            bail!("invalid alpha range {spec:?}");
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
            .collect()
    } else {
        spec.split(',')
            .map(|s| s.trim().parse::<f64>().with_context(|| format!("bad alpha {s:?}")))
            .collect::<Result<_>>()?
    };
    if alphas.is_empty() {
        bail!("empty alpha grid");
    }
    if let Some(a) = alphas.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        bail!("alpha {a} outside [0, 1]");
    }
    Ok(alphas)
}

enum EvaluatorChoice<'a> {
    Synthetic,
    Centroid,
    Table(&'a str),
    External(&'a str),
}

fn parse_evaluator(spec: &str) -> Result<EvaluatorChoice<'_>> {
    Ok(match spec {
        "synthetic" => EvaluatorChoice::Synthetic,
        "centroid" => EvaluatorChoice::Centroid,
        _ => match spec.split_once(':') {
            Some(("table", path)) if !path.is_empty() => EvaluatorChoice::Table(path),
            Some(("external", cmd)) if !cmd.trim().is_empty() => EvaluatorChoice::External(cmd),
            _ => bail!("unknown evaluator {spec:?}; expected synthetic, centroid, table:<path> or external:<cmd>"),
        },
    })
}

/// Everything a run needs, resolved from the arguments.
pub struct Problem {
    pub names: ChannelNames,
    pub model: CostModel,
    pub evaluator: Box<dyn PerformanceFunction>,
    /// Extra facts about the evaluator for the result document.
    pub evaluator_info: Value,
}

fn cost_file(args: &RunArgs) -> Result<Option<(ChannelNames, CostModel)>> {
    if args.costs == "equal" {
        return Ok(None);
    }
    let loaded = load_cost_csv(&args.costs).with_context(|| format!("loading costs {}", args.costs))?;
    Ok(Some(loaded))
}

fn given_names(args: &RunArgs) -> Result<Option<ChannelNames>> {
    if args.channel_names.is_empty() {
        Ok(None)
    } else {
        Ok(Some(ChannelNames::new(args.channel_names.iter().cloned())?))
    }
}

fn load_dataset(args: &RunArgs) -> Result<(DatasetDescriptor, WindowedFeatureSet)> {
    let descriptor_path = args
        .dataset
        .as_ref()
        .ok_or_else(|| anyhow!("centroid evaluator needs --dataset"))?;
    let descriptor = DatasetDescriptor::load(descriptor_path)?;
    if args.data.is_empty() {
        bail!("centroid evaluator needs at least one --data CSV");
    }
    let parts = args
        .data
        .iter()
        .enumerate()
        .map(|(segment, path)| {
            let rec = load_csv(path, &descriptor)
                .with_context(|| format!("loading {}", path.display()))?
                .with_segment(segment);
            Ok(windowed_features(&rec, descriptor.window_seconds, descriptor.overlap_seconds)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((descriptor, WindowedFeatureSet::concat(parts)?))
}

/// Resolve channel names, cost model and evaluator.
pub fn build_problem(args: &RunArgs) -> Result<Problem> {
    let costs = cost_file(args)?;
    let cost_names = costs.as_ref().map(|(n, _)| n.clone());
    let explicit = given_names(args)?.or(cost_names.clone());
    let direction: Direction = args.direction.into();

    let (names, evaluator, info): (ChannelNames, Box<dyn PerformanceFunction>, Value) =
        match parse_evaluator(&args.evaluator)? {
            EvaluatorChoice::Synthetic => {
                let n = args.n.ok_or_else(|| anyhow!("synthetic evaluator needs --n"))?;
                let names = match explicit {
                    Some(names) => {
                        if names.len() != n {
                            bail!("--n {n} but {} channel names supplied", names.len());
                        }
                        names
                    }
                    None => ChannelNames::numbered("ch", n)?,
                };
                if direction != Direction::Maximize {
                    bail!("the synthetic evaluator is a maximized metric");
                }
                let f = SyntheticMonotoneFunction::seeded(n, args.seed, args.utility_min, args.utility_max)?;
                let info = json!({"kind": "synthetic", "utilities": f.utilities()});
                (names, Box::new(f), info)
            }
            EvaluatorChoice::Centroid => {
                let (descriptor, data) = load_dataset(args)?;
                let split = if args.test_segments.is_empty() {
                    SplitSpec::ByFraction {
                        train_fraction: args.split_fraction,
                        seed: args.split_seed,
                    }
                } else {
                    SplitSpec::BySegment {
                        test_segments: args.test_segments.clone(),
                    }
                };
                let clf = train_centroid(&data, &split)?;
                let info = json!({
                    "kind": "centroid",
                    "split": split,
                    "evaluated_on": clf.evaluation_split(),
                    "train_windows": clf.train_rows(),
                    "test_windows": clf.test_rows(),
                    "windows": data.rows(),
                });
                (descriptor.channel_names()?, Box::new(clf), info)
            }
            EvaluatorChoice::Table(path) => {
                let (names, table) = TableOracle::load(path, explicit.as_ref())?;
                let table = table.with_direction(direction).claiming_monotone(args.monotone);
                let info = json!({"kind": "table", "path": path, "entries": table.len()});
                (names, Box::new(table), info)
            }
            EvaluatorChoice::External(cmd) => {
                let names = explicit.ok_or_else(|| {
                    anyhow!("external evaluator needs --channel-names or a --costs file")
                })?;
                let mut config = ExternalEvaluatorConfig::from_command_line(cmd, names.clone())?
                    .with_task(args.task.clone())
                    .with_timeout(Duration::from_secs_f64(args.timeout_secs));
                config.direction = direction;
                config.claims_monotone = args.monotone;
                let ev = ExternalEvaluator::spawn(config)?;
                (names, Box::new(ev), json!({"kind": "external", "command": cmd}))
            }
        };

    let model = match costs {
        Some((cost_names, model)) => {
            if cost_names != names {
                bail!("cost file channels do not match the evaluator's channels");
            }
            model
        }
        None => CostModel::equal(names.len())?,
    };
    Ok(Problem {
        names,
        model,
        evaluator,
        evaluator_info: info,
    })
}

fn subset_json(e: &EvaluatedSubset, names: &ChannelNames) -> Value {
    json!({
        "channels": names.names_of(e.subset),
        "performance": e.performance,
        "cost": e.cost,
        "score": e.score,
        "savings": crate::model::savings_from_cost(e.cost),
    })
}

fn emit(path: Option<&PathBuf>, write: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let mut out = BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?);
            write(&mut out)?;
            out.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut out = stdout.lock();
            write(&mut out)?;
            out.flush()?;
        }
    }
    Ok(())
}

fn write_document(args: &RunArgs, command: &str, mut doc: serde_json::Map<String, Value>, config: Value) -> Result<()> {
    let mut config = config;
    config["command"] = json!(command);
    doc.insert("config".into(), config);
    if !args.deterministic {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        doc.insert("generated_unix_secs".into(), json!(secs));
    }
    emit(args.output.as_ref(), |out| {
        serde_json::to_writer_pretty(&mut *out, &Value::Object(doc))?;
        out.write_all(b"\n")?;
        Ok(())
    })
}

fn params(args: &RunArgs) -> Result<ScoreParams> {
    let lambda = args.lambda.ok_or_else(|| anyhow!("--lambda is required"))?;
    Ok(ScoreParams::new(args.alpha, lambda, args.direction.into())?)
}

fn cmd_search(command: &str, args: &RunArgs) -> Result<i32> {
    let params = params(args)?;
    let problem = build_problem(args)?;
    let (names, model, f) = (&problem.names, &problem.model, problem.evaluator.as_ref());
    let list = |v: &[EvaluatedSubset]| Value::Array(v.iter().map(|e| subset_json(e, names)).collect());
    let mut doc = serde_json::Map::new();
    let feasible_found = match command {
        "bnb" => {
            let out = branch_and_bound(model, f, &params, BnbOptions { record_trace: args.trace.is_some() })?;
            if let (Some(path), Some(trace)) = (&args.trace, &out.trace) {
                let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
                write_trace_jsonl(trace, names, &mut w)?;
                w.flush()?;
            }
            doc.insert("best".into(), out.best.map_or(Value::Null, |b| subset_json(&b, names)));
            doc.insert("feasible".into(), list(&out.feasible));
            let mut stats = serde_json::to_value(out.stats)?;
            stats["exact"] = json!(out.exact);
            doc.insert("stats".into(), stats);
            out.best.is_some()
        }
        "greedy" => {
            let out = greedy_select(model, f, &params)?;
            let found = !out.infeasible_root;
            doc.insert("best".into(), if found { subset_json(&out.best, names) } else { Value::Null });
            doc.insert("feasible".into(), if found { list(&out.path) } else { json!([]) });
            doc.insert("path".into(), list(&out.path));
            doc.insert(
                "stats".into(),
                json!({"evaluations": out.evaluations, "infeasible_root": out.infeasible_root}),
            );
            found
        }
        "exhaustive" => {
            let out = exhaustive_search(model, f, &params)?;
            doc.insert("best".into(), out.best.map_or(Value::Null, |b| subset_json(&b, names)));
            doc.insert("feasible".into(), list(&out.feasible));
            doc.insert("stats".into(), json!({"evaluations": out.evaluations}));
            out.best.is_some()
        }
        other => unreachable!("not a search command: {other}"),
    };
    doc.insert("feasible_found".into(), json!(feasible_found));
    doc.insert("evaluator".into(), problem.evaluator_info.clone());
    write_document(args, command, doc, serde_json::to_value(args)?)?;
    Ok(if feasible_found { EXIT_OK } else { EXIT_INFEASIBLE })
}

fn cmd_alpha_sweep(args: &SweepArgs) -> Result<i32> {
    let alphas = parse_alpha_grid(&args.alphas)?;
    let params = params(&args.run)?;
    let problem = build_problem(&args.run)?;
    let points = alpha_sweep(&problem.model, problem.evaluator.as_ref(), &params, &alphas)?;
    emit(args.run.output.as_ref(), |out| Ok(write_sweep_csv(&points, &problem.names, out)?))?;
    Ok(EXIT_OK)
}

fn cmd_eval_subset(args: &EvalArgs) -> Result<i32> {
    let run = &args.run;
    let params = ScoreParams::new(run.alpha, run.lambda.unwrap_or(0.0), run.direction.into())?;
    let problem = build_problem(run)?;
    let subset = problem.names.resolve(&args.subset)?;
    let performance = crate::evaluators::evaluate(problem.evaluator.as_ref(), subset)?;
    let eval = EvaluatedSubset::new(subset, performance, &problem.model, &params)?;
    let mut doc = subset_json(&eval, &problem.names);
    if run.lambda.is_some() {
        doc["feasible"] = json!(params.is_feasible(performance));
    }
    emit(run.output.as_ref(), |out| {
        serde_json::to_writer_pretty(&mut *out, &doc)?;
        out.write_all(b"\n")?;
        Ok(())
    })?;
    Ok(EXIT_OK)
}

/// Run a parsed command line and return its exit code.
pub fn run(cli: Cli) -> Result<i32> {
    match &cli.command {
        Command::Bnb(args) => cmd_search("bnb", args),
        Command::Greedy(args) => cmd_search("greedy", args),
        Command::Exhaustive(args) => cmd_search("exhaustive", args),
        Command::AlphaSweep(args) => cmd_alpha_sweep(args),
        Command::EvalSubset(args) => cmd_eval_subset(args),
    }
}

/// Parse `argv`, run, and map errors to exit code 1 with a message on stderr.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }
    }
}
