use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use visblock::crossing::regular_ngon_multiplicity;
use visblock::experiment::{self, ExperimentConfig, Task, TaskOutcome, TaskStatus};
use visblock::generate::{generate, Filters, Generated, GeneratorKind, GeneratorSpec};
use visblock::graph::Budget;
use visblock::PointSet;

/// Exit code for unreadable or invalid input.
const INPUT_ERROR: u8 = 4;

#[derive(Parser)]
#[command(name = "visblock", version, about = "Visibility graphs and blocking sets of planar point sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Clone)]
struct Common {
    /// Point set, generated bundle, or generator spec (JSON file).
    #[arg(long, env = "VISBLOCK_INPUT")]
    input: Option<PathBuf>,
    /// Write results here instead of stdout.
    #[arg(long, env = "VISBLOCK_OUTPUT_DIR")]
    output_dir: Option<PathBuf>,
    /// Overrides the seed of random generators.
    #[arg(long, env = "VISBLOCK_SEED")]
    seed: Option<u64>,
    /// Time limit per search, in milliseconds.
    #[arg(long, env = "VISBLOCK_BUDGET_MS")]
    budget_ms: Option<u64>,
    #[arg(long, value_enum, default_value = "json", env = "VISBLOCK_FORMAT")]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Grid,
    GridSubsets,
    ConvexParabola,
    KnnGrid,
    KnnParabola,
    RegularNgon,
    RandomGeneralPosition,
    ArcDrawing,
    File,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a point set or drawing bundle.
    Generate {
        #[arg(long, value_enum)]
        kind: Option<Kind>,
        /// Full generator spec as JSON; overrides --kind.
        #[arg(long)]
        spec: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        w: Option<i64>,
        #[arg(long)]
        h: Option<i64>,
        /// Coordinate bound for random sets; 0 means 10 n^2.
        #[arg(long, default_value_t = 0)]
        bound: i64,
        #[arg(long)]
        max_collinear: Option<usize>,
        #[arg(long)]
        dedupe_symmetry: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Visibility graph, diameter, clique and chromatic numbers.
    Visgraph {
        #[command(flatten)]
        common: Common,
    },
    /// Minimum blocking set (or verification of a drawing's stated blockers).
    Block {
        #[command(flatten)]
        common: Common,
    },
    /// Midpoint and sum-set counts.
    Midpoints {
        #[command(flatten)]
        common: Common,
    },
    /// Crossing-family partition, or the regular polygon census with --ngon-max.
    Crossing {
        /// Census of regular n-gons for n in [4, NGON_MAX].
        #[arg(long)]
        ngon_max: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Arc drawing of K_n with its blockers.
    Drawing {
        #[arg(long)]
        n: Option<usize>,
        /// Points per arc for polyline export.
        #[arg(long)]
        samples: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Big-line-big-clique verdict and 2-colouring line check.
    Ramsey {
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long, default_value_t = 4)]
        l: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Run an experiment config (or a previous manifest) into a run directory.
    Run {
        #[arg(long, env = "VISBLOCK_CONFIG")]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Aggregate run directories into CSV and plot-data tables.
    Report {
        runs: Vec<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

/// An error that maps to the input-error exit code.
#[derive(Debug)]
struct InputError(anyhow::Error);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for InputError {}

fn input_err(e: impl Into<anyhow::Error>) -> anyhow::Error {
    InputError(e.into()).into()
}

fn with_seed(mut spec: GeneratorSpec, seed: Option<u64>) -> GeneratorSpec {
    if let (GeneratorKind::RandomGeneralPosition { seed: s, .. }, Some(new)) = (&mut spec.kind, seed) {
        *s = new;
    }
    spec
}

fn load_input(common: &Common) -> Result<Generated> {
    let path = common
        .input
        .as_ref()
        .ok_or_else(|| input_err(anyhow::anyhow!("--input is required")))?;
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(input_err)?;
    if let Ok(p) = PointSet::from_json(&text) {
        return Ok(Generated::PointSet { set: p });
    }
    if let Ok(g) = serde_json::from_str::<Generated>(&text) {
        return Ok(g);
    }
    let spec: GeneratorSpec = serde_json::from_str(&text)
        .with_context(|| format!("{} is not a point set, bundle, or generator spec", path.display()))
        .map_err(input_err)?;
    generate(&with_seed(spec, common.seed)).map_err(input_err)
}

fn emit(common: &Common, file: &str, text: &str) -> Result<()> {
    match &common.output_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let path = dir.join(file);
            std::fs::write(&path, text)?;
            eprintln!("wrote {}", path.display());
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn status_code(status: TaskStatus) -> u8 {
    match status {
        TaskStatus::Ok => 0,
        TaskStatus::VerificationFailed => 2,
        TaskStatus::BudgetExhausted => 3,
        TaskStatus::Error => INPUT_ERROR,
    }
}

fn single_task(common: &Common, g: &Generated, task: Task, tweak: impl FnOnce(&mut ExperimentConfig)) -> Result<u8> {
    let mut cfg = ExperimentConfig::new(GeneratorKind::Grid { w: 1, h: 1 }, &[task]);
    if let Some(ms) = common.budget_ms {
        cfg.budgets.insert(task, ms);
    }
    tweak(&mut cfg);
    let outcome: TaskOutcome = experiment::run_task(&cfg, g, task);
    if let Some(e) = &outcome.error {
        eprintln!("error: {e}");
    }
    for f in &outcome.failures {
        eprintln!("verification failed: {f}");
    }
    emit(common, &format!("{task}.json"), &serde_json::to_string_pretty(&outcome)?)?;
    Ok(status_code(outcome.status))
}

#[allow(clippy::too_many_arguments)]
fn generator_from_flags(
    kind: Option<Kind>,
    spec: Option<String>,
    n: Option<usize>,
    w: Option<i64>,
    h: Option<i64>,
    bound: i64,
    common: &Common,
) -> Result<GeneratorSpec> {
    if let Some(s) = spec {
        return serde_json::from_str(&s).context("parsing --spec").map_err(input_err);
    }
    let need = |v: Option<usize>, flag: &str| v.ok_or_else(|| input_err(anyhow::anyhow!("--{flag} is required")));
    let needi = |v: Option<i64>, flag: &str| v.ok_or_else(|| input_err(anyhow::anyhow!("--{flag} is required")));
    let kind = match kind.ok_or_else(|| input_err(anyhow::anyhow!("--kind or --spec is required")))? {
        Kind::Grid => GeneratorKind::Grid { w: needi(w, "w")?, h: needi(h, "h")? },
        Kind::GridSubsets => GeneratorKind::GridSubsets {
            w: needi(w, "w")?,
            h: needi(h, "h")?,
            n: need(n, "n")?,
        },
        Kind::ConvexParabola => GeneratorKind::ConvexParabola { n: need(n, "n")? },
        Kind::KnnGrid => GeneratorKind::KnnGrid { n: need(n, "n")? },
        Kind::KnnParabola => GeneratorKind::KnnParabola { n: need(n, "n")? },
        Kind::RegularNgon => GeneratorKind::RegularNgon { n: need(n, "n")? },
        Kind::RandomGeneralPosition => GeneratorKind::RandomGeneralPosition {
            n: need(n, "n")?,
            bound,
            seed: common
                .seed
                .ok_or_else(|| input_err(anyhow::anyhow!("random generators need an explicit --seed")))?,
        },
        Kind::ArcDrawing => GeneratorKind::ArcDrawing { n: need(n, "n")? },
        Kind::File => GeneratorKind::File {
            path: common
                .input
                .clone()
                .ok_or_else(|| input_err(anyhow::anyhow!("--input is required for the file kind")))?,
        },
    };
    Ok(GeneratorSpec {
        kind,
        filters: Filters::default(),
    })
}

fn census_csv(max: usize, budget: Option<u64>) -> Result<String> {
    let mut s = String::from("n,center_mult,max_excl_center,certified\n");
    for n in 4..=max {
        let c = regular_ngon_multiplicity(n, Budget::from_option(budget))?;
        s.push_str(&format!(
            "{},{},{},{}\n",
            n, c.center_multiplicity, c.max_multiplicity_excluding_center, c.certified
        ));
    }
    Ok(s)
}

fn run_cli(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Generate {
            kind,
            spec,
            n,
            w,
            h,
            bound,
            max_collinear,
            dedupe_symmetry,
            common,
        } => {
            let mut spec = generator_from_flags(kind, spec, n, w, h, bound, &common)?;
            if max_collinear.is_some() {
                spec.filters.max_collinear = max_collinear;
            }
            spec.filters.dedupe_symmetry |= dedupe_symmetry;
            let spec = with_seed(spec, common.seed);
            let g = generate(&spec).map_err(input_err)?;
            emit(&common, "generated.json", &g.to_json())?;
            Ok(0)
        }
        Command::Visgraph { common } => single_task(&common, &load_input(&common)?, Task::Visgraph, |_| {}),
        Command::Block { common } => single_task(&common, &load_input(&common)?, Task::Block, |_| {}),
        Command::Midpoints { common } => single_task(&common, &load_input(&common)?, Task::Midpoints, |_| {}),
        Command::Crossing { ngon_max, common } => match ngon_max {
            Some(max) => {
                let csv = census_csv(max, common.budget_ms)?;
                let certified = csv.lines().skip(1).all(|l| l.ends_with("true"));
                let seven = csv
                    .lines()
                    .skip(1)
                    .all(|l| l.split(',').nth(2).and_then(|v| v.parse::<usize>().ok()).is_some_and(|v| v <= 7));
                emit(&common, "ngon_census.csv", csv.trim_end())?;
                Ok(if !seven {
                    2
                } else if !certified {
                    3
                } else {
                    0
                })
            }
            None => single_task(&common, &load_input(&common)?, Task::Crossing, |_| {}),
        },
        Command::Drawing { n, samples, common } => {
            let g = match n {
                Some(n) => generate(&GeneratorKind::ArcDrawing { n }.into()).map_err(input_err)?,
                None => load_input(&common)?,
            };
            single_task(&common, &g, Task::Drawing, |c| c.params.polyline_samples = samples)
        }
        Command::Ramsey { k, l, common } => single_task(&common, &load_input(&common)?, Task::Ramsey, |c| {
            c.params.ramsey_k = k;
            c.params.ramsey_l = l;
        }),
        Command::Run { config, common } => {
            let text = std::fs::read_to_string(&config)
                .with_context(|| format!("reading {}", config.display()))
                .map_err(input_err)?;
            let mut cfg = ExperimentConfig::from_json(&text).map_err(input_err)?;
            cfg.generator = with_seed(cfg.generator, common.seed);
            if let Some(ms) = common.budget_ms {
                for t in cfg.tasks.clone() {
                    cfg.budgets.entry(t).or_insert(ms);
                }
            }
            if common.format == Format::Csv && !cfg.output.formats.iter().any(|f| f == "csv") {
                cfg.output.formats.push("csv".into());
            }
            let dir = common
                .output_dir
                .clone()
                .or_else(|| cfg.output.dir.clone())
                .ok_or_else(|| input_err(anyhow::anyhow!("--output-dir (or output.dir in the config) is required")))?;
            let summary = experiment::run(&cfg, &dir).map_err(input_err)?;
            for t in &summary.manifest.tasks {
                eprintln!("{:<10} {:?} ({:.1} ms)", t.task.to_string(), t.status, t.wall_ms);
            }
            for c in summary.checks.iter().filter(|c| !c.passed) {
                eprintln!("check failed: {} ({})", c.name, c.detail);
            }
            println!("{}", dir.display());
            Ok(summary.exit_code() as u8)
        }
        Command::Report { runs, common } => {
            let tables = experiment::report(&runs, common.output_dir.as_deref()).map_err(input_err)?;
            match common.format {
                Format::Csv => print!("{}", experiment::summary_csv(&tables.rows)),
                Format::Json if common.output_dir.is_none() => {
                    println!("{}", serde_json::to_string_pretty(&tables)?)
                }
                Format::Json => {
                    let dir: &Path = common.output_dir.as_deref().unwrap();
                    std::fs::write(dir.join("report.json"), serde_json::to_string_pretty(&tables)?)?;
                    eprintln!("wrote {}", dir.display());
                }
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("VISBLOCK_LOG", "warn")).init();
    let cli = Cli::parse();
    match run_cli(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<InputError>().is_some() {
                ExitCode::from(INPUT_ERROR)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
