use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use recolor_core::io::{
    instance_to_json_pretty, instance_to_tsv, parse_cover, parse_instance, penalty_report_json, ratio_report_csv,
    ratio_report_json, trace_json, verify_cover, IoError, ResultFile,
};
use recolor_core::oracle::{exact_opt_capped, gen_instance, measure_ratio, Algorithm, GenParams, Shape, DEFAULT_CAP};
use recolor_core::penalty::lower_bound;
use recolor_core::weight::{format_rational, parse_rational};
use recolor_core::{Error, Instance, LocalRatioStep, Rational, Solution};

/// Convex recoloring of weighted colored strings and trees.
#[derive(Debug, Parser)]
#[command(name = "recolor", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Per-color best blocks and the penalty lower bound.
    Lowerbound {
        /// Instance file (JSON or TSV), or "-" for stdin.
        instance: PathBuf,
    },
    /// Run an approximation algorithm.
    Approx {
        instance: PathBuf,
        #[arg(long, value_enum)]
        algo: AlgoArg,
        /// Attach the reduction trace (tree3) or local-ratio rounds (string3, tree4).
        #[arg(long)]
        trace: bool,
        /// Also compute the exact optimum and check the proven factor.
        #[arg(long)]
        opt: bool,
    },
    /// Exact optimum by exhaustive search.
    Exact {
        instance: PathBuf,
        /// Refuse instances with more vertices than this.
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Check that a vertex set is a cover and report its weight.
    Verify {
        instance: PathBuf,
        /// JSON list of ids, a result file, or whitespace separated ids; "-" for stdin.
        #[arg(long)]
        cover: PathBuf,
    },
    /// Generate a seeded random instance.
    Gen {
        #[arg(long, value_enum, default_value_t = ShapeArg::RandomTree)]
        shape: ShapeArg,
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        c: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        weight_max: u32,
        /// Chance of a weight-0 uncolored vertex, e.g. "1/4".
        #[arg(long, default_value = "0")]
        zero_fraction: String,
        #[arg(long, value_enum, default_value_t = InstanceFormat::Json)]
        format: InstanceFormat,
    },
    /// Measure approximation ratios against the exact oracle.
    Bench {
        #[arg(long, value_enum)]
        algo: AlgoArg,
        /// Defaults to path for string algorithms, random-tree otherwise.
        #[arg(long, value_enum)]
        shape: Option<ShapeArg>,
        /// Largest instance size; each instance draws its size up to this.
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        c: usize,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        weight_max: u32,
        #[arg(long, default_value = "0")]
        zero_fraction: String,
        #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
        format: ReportFormat,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AlgoArg {
    String2,
    String3,
    Tree3,
    Tree4,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Algorithm {
        match a {
            AlgoArg::String2 => Algorithm::String2,
            AlgoArg::String3 => Algorithm::String3,
            AlgoArg::Tree3 => Algorithm::Tree3,
            AlgoArg::Tree4 => Algorithm::Tree4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ShapeArg {
    RandomTree,
    Path,
    Star,
    Caterpillar,
    Case2Spider,
    Case3bFamily,
}

impl From<ShapeArg> for Shape {
    fn from(s: ShapeArg) -> Shape {
        match s {
            ShapeArg::RandomTree => Shape::RandomTree,
            ShapeArg::Path => Shape::Path,
            ShapeArg::Star => Shape::Star,
            ShapeArg::Caterpillar => Shape::Caterpillar,
            ShapeArg::Case2Spider => Shape::Case2Spider,
            ShapeArg::Case3bFamily => Shape::Case3bFamily,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum InstanceFormat {
    Json,
    Tsv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Csv,
}

/// Signals a checked failure whose report was already printed.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct Rejected(String);

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.as_bytes());
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

/// 2 for broken internal invariants, 1 for everything the input can cause.
fn exit_code(err: &anyhow::Error) -> u8 {
    let internal = err.chain().any(|e| {
        matches!(e.downcast_ref::<Error>(), Some(Error::Invariant(_) | Error::BoundExceeded { .. }))
    });
    if internal {
        2
    } else {
        1
    }
}

fn read_input(path: &PathBuf) -> anyhow::Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading stdin")?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn load(path: &PathBuf) -> anyhow::Result<Instance> {
    let text = read_input(path)?;
    parse_instance(&text).with_context(|| format!("parsing {}", path.display()))
}

fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("value serializes");
    s.push('\n');
    s
}

fn fraction(text: &str) -> anyhow::Result<Rational> {
    parse_rational(text).map_err(|e| anyhow!("--zero-fraction: {e}"))
}

fn steps_json(inst: &Instance, steps: &[LocalRatioStep]) -> Value {
    let rounds: Vec<Value> = steps
        .iter()
        .map(|s| {
            json!({
                "vertices": s.vertices.iter().map(|&v| inst.id(v)).collect::<Vec<_>>(),
                "epsilon": format_rational(&inst.to_rational(s.epsilon)),
            })
        })
        .collect();
    json!({ "rounds": rounds })
}

fn run(command: Command) -> anyhow::Result<String> {
    match command {
        Command::Lowerbound { instance } => {
            let inst = load(&instance)?;
            Ok(pretty(&penalty_report_json(&inst, &lower_bound(&inst))))
        }
        Command::Approx { instance, algo, trace, opt } => {
            let inst = load(&instance)?;
            let algo = Algorithm::from(algo);
            let run = algo.run(&inst)?;
            let optimum = if opt { Some(exact_opt_capped(&inst, DEFAULT_CAP)?.1) } else { None };
            if let Some(o) = optimum {
                if run.solution.cover_weight > o * i128::from(algo.bound()) {
                    return Err(Error::BoundExceeded {
                        algorithm: algo.name().to_string(),
                        bound: algo.bound(),
                        cost: format_rational(&inst.to_rational(run.solution.cover_weight)),
                        opt: format_rational(&inst.to_rational(o)),
                        instance: recolor_core::io::instance_to_json(&inst),
                    }
                    .into());
                }
            }
            let mut result = ResultFile::new(algo.name(), &inst, &run.solution.coloring, lower_bound(&inst).lower_bound, optimum)
                .with_algorithm_cover(&inst, &run.solution.cover);
            if trace {
                result.trace = Some(match &run.trace {
                    Some(t) => trace_json(t),
                    None => steps_json(&inst, &run.steps),
                });
            }
            Ok(pretty(&result))
        }
        Command::Exact { instance, cap } => {
            let inst = load(&instance)?;
            let (cover, weight) = exact_opt_capped(&inst, cap)?;
            let solution = Solution::from_cover(&inst, cover)?;
            let result = ResultFile::new("exact", &inst, &solution.coloring, lower_bound(&inst).lower_bound, Some(weight))
                .with_algorithm_cover(&inst, &solution.cover);
            Ok(pretty(&result))
        }
        Command::Verify { instance, cover } => {
            if instance.as_os_str() == "-" && cover.as_os_str() == "-" {
                bail!("instance and cover cannot both come from stdin");
            }
            let inst = load(&instance)?;
            let text = read_input(&cover)?;
            let set = parse_cover(&text, &inst).with_context(|| format!("parsing {}", cover.display()))?;
            let report = verify_cover(&inst, &set);
            let out = pretty(&report);
            if !report.valid {
                print!("{out}");
                return Err(Rejected("the set is not a cover".into()).into());
            }
            Ok(out)
        }
        Command::Gen { shape, n, c, seed, weight_max, zero_fraction, format } => {
            let params = GenParams {
                n,
                c,
                weight_max,
                shape: shape.into(),
                zero_weight_fraction: fraction(&zero_fraction)?,
                seed,
            };
            let inst = gen_instance(&params)?;
            match format {
                InstanceFormat::Json => Ok(format!("{}\n", instance_to_json_pretty(&inst))),
                InstanceFormat::Tsv => instance_to_tsv(&inst).ok_or_else(|| anyhow!("TSV output needs the path shape")),
            }
        }
        Command::Bench { algo, shape, n, c, count, seed, weight_max, zero_fraction, format } => {
            let algo = Algorithm::from(algo);
            let shape = shape.map_or(if algo.needs_string() { Shape::Path } else { Shape::RandomTree }, Shape::from);
            let params = GenParams { n, c, weight_max, shape, zero_weight_fraction: fraction(&zero_fraction)?, seed };
            let report = measure_ratio(algo, &params, count)?;
            let out = match format {
                ReportFormat::Json => pretty(&ratio_report_json(&report)),
                ReportFormat::Csv => ratio_report_csv(&report).map_err(|e: IoError| anyhow!(e))?,
            };
            if let Err(e) = report.ensure_within_bound() {
                print!("{out}");
                return Err(e.into());
            }
            Ok(out)
        }
    }
}
