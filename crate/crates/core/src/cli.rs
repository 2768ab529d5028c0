//! Command-line front end.
//!
//! Exit codes: 0 success (complete, hard-feasible timetable), 1 input error,
//! 2 infeasible result or invalid solution file.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::construction::ConstructionConfig;
use crate::evaluation::{evaluate_placements, validate_hard, SoftBreakdown};
use crate::harness::{self, BenchInstance};
use crate::io::{parse_instance, parse_placements, write_solution};
use crate::model::Instance;
use crate::search::{Algorithm, Budget, SearchConfig, Threshold};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;

/// Environment variable naming the default directory for instance files.
pub const DATA_DIR_ENV: &str = "CTT_DATA_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "ctt",
    version,
    about = "Curriculum-based course timetabling solver"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Construct and improve a timetable for one instance.
    Solve(SolveArgs),
    /// Check a solution file and print its cost breakdown.
    Validate(ValidateArgs),
    /// Count feasible constructions per loop over repeated trials (CSV).
    Construct(ConstructArgs),
    /// Run configurations over instances and seeds and tabulate the results.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgoArg {
    Ta,
    Ils,
}

#[derive(Debug, Clone, Args)]
#[group(multiple = false)]
pub struct BudgetArgs {
    /// Wall-clock budget in seconds.
    #[arg(long, value_name = "SECONDS")]
    pub time: Option<f64>,
    /// Number of candidate evaluations (reproducible across machines).
    #[arg(long, value_name = "N")]
    pub evals: Option<u64>,
}

impl BudgetArgs {
    fn budget(&self) -> Result<Budget, String> {
        match (self.time, self.evals) {
            (Some(t), _) if !(t.is_finite() && t >= 0.0) => Err(format!("invalid time budget {t}")),
            (Some(t), _) => Ok(Budget::Time(Duration::from_secs_f64(t))),
            (None, Some(n)) => Ok(Budget::Evaluations(n)),
            (None, None) => Ok(Budget::Evaluations(1_000_000)),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    /// Instance file; looked up in $CTT_DATA_DIR when not found as given.
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value = "ta")]
    pub algo: AlgoArg,
    /// Threshold in percent of the best sc (TA only).
    #[arg(long, default_value = "1")]
    pub threshold: Threshold,
    /// Events removed per move.
    #[arg(long, default_value_t = 5)]
    pub ruin: usize,
    /// Non-improving moves before an ILS perturbation.
    #[arg(long, default_value_t = 10_000)]
    pub patience: u64,
    #[command(flatten)]
    pub budget: BudgetArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Maximum reactive construction loops.
    #[arg(long, default_value_t = 50)]
    pub max_loops: usize,
    /// Probability of preferring best-fit rooms over merely fitting ones.
    #[arg(long, default_value_t = 0.5)]
    pub room_order_prob: f64,
    /// Solution output path; stdout when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Table,
    Kv,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    pub instance: PathBuf,
    pub solution: PathBuf,
    #[arg(long, value_enum, default_value = "table")]
    pub format: FormatArg,
}

#[derive(Debug, Clone, Args)]
pub struct ConstructArgs {
    pub instance: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 10)]
    pub loops: usize,
    /// Seed of the first trial; trial i uses seed + i.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.5)]
    pub room_order_prob: f64,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Instance files; names are looked up in $CTT_DATA_DIR.
    #[arg(required = true)]
    pub instances: Vec<PathBuf>,
    /// Comma-separated presets: ta0, ta1, ta2, ils10k, ils3k.
    #[arg(
        long,
        default_value = "ta0,ta1,ta2,ils10k,ils3k",
        value_delimiter = ','
    )]
    pub configs: Vec<String>,
    /// Seeds as a list and/or ranges, e.g. `1,2,5-9`.
    #[arg(long, default_value = "1-10")]
    pub seeds: String,
    #[command(flatten)]
    pub budget: BudgetArgs,
    #[arg(long, default_value_t = 50)]
    pub max_loops: usize,
    /// Write the per-(instance, config) summary CSV here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Write the per-seed rows CSV here.
    #[arg(long)]
    pub runs_csv: Option<PathBuf>,
}

/// Parses arguments and runs the command, returning the process exit code.
pub fn run_from<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli, out, err),
        Err(e) => {
            let _ = write!(err, "{e}");
            if e.use_stderr() {
                EXIT_INPUT
            } else {
                EXIT_OK
            }
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(&a, out, err),
        Command::Validate(a) => cmd_validate(&a, out),
        Command::Construct(a) => cmd_construct(&a, out),
        Command::Bench(a) => cmd_bench(&a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(message) => {
            let _ = writeln!(err, "error: {message}");
            EXIT_INPUT
        }
    }
}

/// Resolves an instance path, falling back to `$CTT_DATA_DIR` and a `.ctt`
/// extension.
pub fn resolve_instance(path: &Path) -> PathBuf {
    if path.exists() {
        return path.to_path_buf();
    }
    let mut candidates = Vec::new();
    if let Some(dir) = std::env::var_os(DATA_DIR_ENV) {
        let dir = PathBuf::from(dir);
        candidates.push(dir.join(path));
        candidates.push(dir.join(path).with_extension("ctt"));
    }
    candidates.push(path.with_extension("ctt"));
    candidates
        .into_iter()
        .find(|p| p.exists())
        .unwrap_or_else(|| path.to_path_buf())
}

pub fn load_instance(path: &Path) -> Result<Instance, String> {
    let resolved = resolve_instance(path);
    let text = std::fs::read_to_string(&resolved)
        .map_err(|e| format!("cannot read {}: {e}", resolved.display()))?;
    parse_instance(&text).map_err(|e| format!("{}: {e}", resolved.display()))
}

fn breakdown_lines(b: &SoftBreakdown) -> [(&'static str, u64); 4] {
    [
        ("room_capacity", b.room_capacity),
        ("min_working_days", b.min_working_days),
        ("curriculum_compactness", b.curriculum_compactness),
        ("room_stability", b.room_stability),
    ]
}

fn io_err(e: std::io::Error) -> String {
    e.to_string()
}

pub fn cmd_solve(
    args: &SolveArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, String> {
    let instance = load_instance(&args.instance)?;
    let budget = args.budget.budget()?;
    let search = SearchConfig {
        algorithm: match args.algo {
            AlgoArg::Ta => Algorithm::ThresholdAccepting,
            AlgoArg::Ils => Algorithm::IteratedLocalSearch,
        },
        threshold: match args.algo {
            AlgoArg::Ta => args.threshold,
            AlgoArg::Ils => Threshold::ZERO,
        },
        ruin_size: args.ruin,
        ils_patience: (args.algo == AlgoArg::Ils).then_some(args.patience),
        budget,
        seed: args.seed,
        room_order_probability: args.room_order_prob,
    };
    if !(0.0..=1.0).contains(&args.room_order_prob) {
        return Err("--room-order-prob must lie in [0, 1]".into());
    }
    if args.max_loops == 0 {
        return Err("--max-loops must be at least 1".into());
    }
    let construction = ConstructionConfig {
        max_loops: args.max_loops,
        order_flip_probability: args.room_order_prob,
    };
    let outcome = harness::solve(&instance, &construction, &search).map_err(|e| e.to_string())?;
    let solution = write_solution(&instance, &outcome.search.best_timetable);
    match &args.output {
        Some(path) => std::fs::write(path, &solution)
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?,
        None => out.write_all(solution.as_bytes()).map_err(io_err)?,
    }

    let result = &outcome.search;
    let secs = result.elapsed.as_secs_f64();
    let mut report = String::new();
    let _ = writeln!(report, "instance={}", instance.name());
    let _ = writeln!(report, "algorithm={}", search.label());
    let _ = writeln!(report, "threshold={}", search.threshold);
    let _ = writeln!(report, "ruin_size={}", search.ruin_size);
    let _ = writeln!(
        report,
        "ils_patience={}",
        search
            .ils_patience
            .map_or("-".to_string(), |p| p.to_string())
    );
    let _ = writeln!(report, "budget={}", search.budget);
    let _ = writeln!(report, "seed={}", search.seed);
    let _ = writeln!(
        report,
        "room_order_probability={}",
        search.room_order_probability
    );
    let _ = writeln!(report, "max_loops={}", construction.max_loops);
    let _ = writeln!(report, "construction_loops={}", outcome.construction_loops);
    let _ = writeln!(report, "start_hc={}", outcome.start_eval.hc);
    let _ = writeln!(report, "start_sc={}", outcome.start_eval.sc);
    let _ = writeln!(report, "hc={}", result.best_eval.hc);
    let _ = writeln!(report, "sc={}", result.best_eval.sc);
    for (k, v) in breakdown_lines(&outcome.breakdown) {
        let _ = writeln!(report, "{k}={v}");
    }
    let _ = writeln!(report, "evaluations={}", result.evaluations);
    let _ = writeln!(report, "elapsed_s={secs:.3}");
    let rate = if secs > 0.0 {
        result.evaluations as f64 / secs
    } else {
        0.0
    };
    let _ = writeln!(report, "evaluations_per_s={rate:.0}");
    err.write_all(report.as_bytes()).map_err(io_err)?;

    Ok(if result.best_eval.hc == 0 {
        EXIT_OK
    } else {
        EXIT_INFEASIBLE
    })
}

pub fn cmd_validate(args: &ValidateArgs, out: &mut dyn Write) -> Result<i32, String> {
    let instance = load_instance(&args.instance)?;
    let text = std::fs::read_to_string(&args.solution)
        .map_err(|e| format!("cannot read {}: {e}", args.solution.display()))?;
    let placements = match parse_placements(&instance, &text) {
        Ok(p) => p,
        Err(e) => {
            writeln!(out, "invalid solution: {e}").map_err(io_err)?;
            return Ok(EXIT_INFEASIBLE);
        }
    };
    let raw: Vec<_> = placements.iter().map(|p| (p.event, p.slot)).collect();
    let violations = validate_hard(&instance, &raw);
    if !violations.is_empty() {
        let line_of = |e: usize| {
            placements
                .iter()
                .find(|p| p.event == e)
                .map_or(0, |p| p.line)
        };
        for v in &violations {
            let cells: Vec<String> = v
                .events
                .iter()
                .map(|&e| {
                    let p = placements.iter().find(|p| p.event == e).expect("placed");
                    format!(
                        "line {} `{} {} {} {}`",
                        line_of(e),
                        instance.courses()[instance.course_of(e)].id,
                        instance.rooms()[p.slot.room].id,
                        p.slot.day,
                        p.slot.period
                    )
                })
                .collect();
            writeln!(out, "violation clause={} {}", v.clause, cells.join("; ")).map_err(io_err)?;
        }
        writeln!(out, "hard_violations={}", violations.len()).map_err(io_err)?;
        return Ok(EXIT_INFEASIBLE);
    }
    let (eval, breakdown) = evaluate_placements(&instance, &raw).map_err(|e| e.to_string())?;
    let mut rows: Vec<(&str, u64)> = vec![("hc", eval.hc as u64)];
    rows.extend(breakdown_lines(&breakdown));
    rows.push(("sc", eval.sc));
    match args.format {
        FormatArg::Kv => {
            for (k, v) in rows {
                writeln!(out, "{k}={v}").map_err(io_err)?;
            }
        }
        FormatArg::Table => {
            writeln!(out, "instance                {}", instance.name()).map_err(io_err)?;
            for (k, v) in rows {
                writeln!(out, "{k:<22}  {v:>6}").map_err(io_err)?;
            }
        }
    }
    Ok(if eval.hc == 0 {
        EXIT_OK
    } else {
        EXIT_INFEASIBLE
    })
}

pub fn cmd_construct(args: &ConstructArgs, out: &mut dyn Write) -> Result<i32, String> {
    if args.trials == 0 || args.loops == 0 {
        return Err("--trials and --loops must be at least 1".into());
    }
    let instance = load_instance(&args.instance)?;
    let counts = harness::construction_trials(
        &instance,
        args.trials,
        args.loops,
        args.seed,
        args.room_order_prob,
    );
    out.write_all(counts.to_csv().as_bytes()).map_err(io_err)?;
    Ok(EXIT_OK)
}

/// Parses `1,2,5-9` into a seed list.
pub fn parse_seeds(list: &str) -> Result<Vec<u64>, String> {
    let mut seeds = Vec::new();
    for part in list.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let bad = || format!("invalid seed list entry `{part}`");
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (u64, u64) = (
                    a.trim().parse().map_err(|_| bad())?,
                    b.trim().parse().map_err(|_| bad())?,
                );
                if a > b {
                    return Err(bad());
                }
                seeds.extend(a..=b);
            }
            None => seeds.push(part.parse().map_err(|_| bad())?),
        }
    }
    if seeds.is_empty() {
        return Err("no seeds given".into());
    }
    Ok(seeds)
}

pub fn cmd_bench(
    args: &BenchArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, String> {
    let budget = args.budget.budget()?;
    let seeds = parse_seeds(&args.seeds)?;
    let configs = args
        .configs
        .iter()
        .map(|name| {
            SearchConfig::preset(name, budget, 0)
                .map(|c| (name.clone(), c))
                .ok_or_else(|| {
                    format!(
                        "unknown config `{name}` (expected one of {:?})",
                        SearchConfig::PRESETS
                    )
                })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let instances: Vec<BenchInstance> = args
        .instances
        .iter()
        .map(|p| {
            let name = p.file_stem().map_or_else(
                || p.display().to_string(),
                |s| s.to_string_lossy().into_owned(),
            );
            (name, load_instance(p))
        })
        .collect();
    let construction = ConstructionConfig {
        max_loops: args.max_loops,
        ..ConstructionConfig::default()
    };
    writeln!(
        err,
        "budget={budget} seeds={seeds:?} max_loops={}",
        args.max_loops
    )
    .map_err(io_err)?;
    let report = harness::bench(&instances, &configs, &seeds, &construction);
    out.write_all(report.table().as_bytes()).map_err(io_err)?;
    if configs.iter().any(|(n, _)| n == "ta0") && configs.iter().any(|(n, _)| n == "ta1") {
        for (name, _) in &instances {
            if let Some(flag) = report.ordering_flag(name, "ta1", "ta0") {
                writeln!(out, "note: {flag}").map_err(io_err)?;
            }
        }
    }
    if let Some(path) = &args.csv {
        std::fs::write(path, report.summary_csv())
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    if let Some(path) = &args.runs_csv {
        std::fs::write(path, report.runs_csv())
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    Ok(if instances.iter().any(|(_, i)| i.is_err()) {
        EXIT_INPUT
    } else {
        EXIT_OK
    })
}
