//! Experiment drivers shared by the CLI and the acceptance tests.

use std::fmt::Write as _;
use std::time::Duration;

use rayon::prelude::*;

use crate::construction::{reactive_construct, ConstructionConfig};
use crate::evaluation::{evaluate_full, Evaluation, SoftBreakdown};
use crate::model::Instance;
use crate::rng::{self, Stream};
use crate::search::{Search, SearchConfig, SearchError, SearchResult};

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub construction_loops: usize,
    pub start_eval: Evaluation,
    pub search: SearchResult,
    pub breakdown: SoftBreakdown,
}

/// Reactive construction followed by the configured search, both seeded
/// from `search.seed` on separate streams.
pub fn solve(
    instance: &Instance,
    construction: &ConstructionConfig,
    search: &SearchConfig,
) -> Result<SolveOutcome, SearchError> {
    let searcher = Search::new(instance, search)?;
    let start = reactive_construct(
        instance,
        construction,
        &mut rng::stream(search.seed, Stream::Construction),
    );
    let start_eval = evaluate_full(instance, &start.timetable).0;
    let result = searcher.run(
        &start.timetable,
        &mut rng::stream(search.seed, Stream::Search),
    );
    let (eval, breakdown) = evaluate_full(instance, &result.best_timetable);
    debug_assert_eq!(eval, result.best_eval);
    Ok(SolveOutcome {
        construction_loops: start.loops,
        start_eval,
        search: result,
        breakdown,
    })
}

/// Cumulative feasible-run counts per loop index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopCounts {
    pub trials: usize,
    /// `feasible_by_loop[l]` = trials feasible within `l + 1` loops.
    pub feasible_by_loop: Vec<usize>,
}

impl LoopCounts {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("loop,feasible_count\n");
        for (l, n) in self.feasible_by_loop.iter().enumerate() {
            let _ = writeln!(out, "{},{}", l + 1, n);
        }
        out
    }

    pub fn fraction(&self, loops: usize) -> f64 {
        self.feasible_by_loop[loops - 1] as f64 / self.trials as f64
    }
}

/// Runs `trials` reactive constructions capped at `loops` loops. Trial `i`
/// uses seed `base_seed + i`. With `loops = 1` this is the myopic experiment.
pub fn construction_trials(
    instance: &Instance,
    trials: usize,
    loops: usize,
    base_seed: u64,
    order_flip_probability: f64,
) -> LoopCounts {
    let config = ConstructionConfig {
        max_loops: loops,
        order_flip_probability,
    };
    let used: Vec<Option<usize>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(base_seed.wrapping_add(i as u64), Stream::Construction);
            let outcome = reactive_construct(instance, &config, &mut rng);
            outcome.is_feasible().then_some(outcome.loops)
        })
        .collect();
    let feasible_by_loop = (1..=loops)
        .map(|l| used.iter().filter(|u| u.is_some_and(|n| n <= l)).count())
        .collect();
    LoopCounts {
        trials,
        feasible_by_loop,
    }
}

/// One `(instance, config, seed)` run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub instance: String,
    pub config: String,
    pub seed: u64,
    pub outcome: Result<RunStats, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunStats {
    pub hc: usize,
    pub sc: u64,
    pub evaluations: u64,
    pub elapsed: Duration,
    pub construction_loops: usize,
}

/// Per-(instance, config) summary over seeds; sc figures count feasible runs only.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub instance: String,
    pub config: String,
    pub runs: usize,
    pub feasible: usize,
    pub mean_sc: Option<f64>,
    pub best_sc: Option<u64>,
    pub worst_sc: Option<u64>,
    pub mean_evaluations: f64,
    pub total_elapsed: Duration,
    pub error: Option<String>,
}

impl Aggregate {
    pub fn feasible_fraction(&self) -> f64 {
        if self.runs == 0 {
            0.0
        } else {
            self.feasible as f64 / self.runs as f64
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunReport {
    pub rows: Vec<RunRow>,
}

impl RunReport {
    /// Summaries in first-appearance order of `(instance, config)`.
    pub fn aggregates(&self) -> Vec<Aggregate> {
        let mut keys: Vec<(&str, &str)> = Vec::new();
        for row in &self.rows {
            let key = (row.instance.as_str(), row.config.as_str());
            if !keys.contains(&key) {
                keys.push(key);
            }
        }
        keys.into_iter()
            .map(|(instance, config)| {
                let rows: Vec<&RunRow> = self
                    .rows
                    .iter()
                    .filter(|r| r.instance == instance && r.config == config)
                    .collect();
                let stats: Vec<&RunStats> = rows
                    .iter()
                    .filter_map(|r| r.outcome.as_ref().ok())
                    .collect();
                let feasible: Vec<u64> = stats.iter().filter(|s| s.hc == 0).map(|s| s.sc).collect();
                let mean_evaluations = if stats.is_empty() {
                    0.0
                } else {
                    stats.iter().map(|s| s.evaluations as f64).sum::<f64>() / stats.len() as f64
                };
                Aggregate {
                    instance: instance.to_string(),
                    config: config.to_string(),
                    runs: rows.len(),
                    feasible: feasible.len(),
                    mean_sc: (!feasible.is_empty())
                        .then(|| feasible.iter().sum::<u64>() as f64 / feasible.len() as f64),
                    best_sc: feasible.iter().min().copied(),
                    worst_sc: feasible.iter().max().copied(),
                    mean_evaluations,
                    total_elapsed: stats.iter().map(|s| s.elapsed).sum(),
                    error: rows.iter().find_map(|r| r.outcome.as_ref().err().cloned()),
                }
            })
            .collect()
    }

    pub fn aggregate(&self, instance: &str, config: &str) -> Option<Aggregate> {
        self.aggregates()
            .into_iter()
            .find(|a| a.instance == instance && a.config == config)
    }

    /// Note when `better`'s mean sc is not strictly below `worse`'s on `instance`.
    pub fn ordering_flag(&self, instance: &str, better: &str, worse: &str) -> Option<String> {
        let a = self.aggregate(instance, better)?;
        let b = self.aggregate(instance, worse)?;
        match (a.mean_sc, b.mean_sc) {
            (Some(x), Some(y)) if x < y => None,
            (Some(x), Some(y)) => Some(format!(
                "{instance}: expected mean sc of {better} ({x:.1}) below {worse} ({y:.1})"
            )),
            _ => Some(format!(
                "{instance}: {better} or {worse} has no feasible run to compare"
            )),
        }
    }

    pub fn runs_csv(&self) -> String {
        let mut out = String::from(
            "instance,config,seed,hc,sc,evaluations,elapsed_s,construction_loops,error\n",
        );
        for r in &self.rows {
            match &r.outcome {
                Ok(s) => {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{},{:.3},{},",
                        r.instance,
                        r.config,
                        r.seed,
                        s.hc,
                        s.sc,
                        s.evaluations,
                        s.elapsed.as_secs_f64(),
                        s.construction_loops
                    );
                }
                Err(e) => {
                    let _ = writeln!(
                        out,
                        "{},{},{},,,,,,\"{}\"",
                        r.instance,
                        r.config,
                        r.seed,
                        e.replace('"', "'")
                    );
                }
            }
        }
        out
    }

    pub fn summary_csv(&self) -> String {
        let mut out =
            String::from("instance,config,runs,feasible,mean_sc,best_sc,worst_sc,mean_evaluations,total_elapsed_s\n");
        let opt = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
        for a in self.aggregates() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{:.0},{:.3}",
                a.instance,
                a.config,
                a.runs,
                a.feasible,
                a.mean_sc.map(|m| format!("{m:.2}")).unwrap_or_default(),
                opt(a.best_sc),
                opt(a.worst_sc),
                a.mean_evaluations,
                a.total_elapsed.as_secs_f64()
            );
        }
        out
    }

    pub fn table(&self) -> String {
        let header = [
            "instance",
            "config",
            "runs",
            "feasible",
            "mean sc",
            "best sc",
            "evals/run",
            "time (s)",
        ];
        let mut rows: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
        for a in self.aggregates() {
            let dash = || "-".to_string();
            rows.push(vec![
                a.instance.clone(),
                a.config.clone(),
                a.runs.to_string(),
                a.feasible.to_string(),
                a.mean_sc.map(|m| format!("{m:.1}")).unwrap_or_else(dash),
                a.best_sc.map(|b| b.to_string()).unwrap_or_else(dash),
                format!("{:.0}", a.mean_evaluations),
                format!("{:.1}", a.total_elapsed.as_secs_f64()),
            ]);
            if let Some(e) = a.error {
                rows.last_mut().unwrap()[4] = format!("error: {e}");
            }
        }
        let widths: Vec<usize> = (0..header.len())
            .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for row in rows {
            let line: Vec<String> = row
                .iter()
                .enumerate()
                .map(|(c, cell)| {
                    if c < 2 {
                        format!("{cell:<w$}", w = widths[c])
                    } else {
                        format!("{cell:>w$}", w = widths[c])
                    }
                })
                .collect();
            let _ = writeln!(out, "{}", line.join("  ").trim_end());
        }
        out
    }
}

/// A benchmark input: a name and either the instance or the reason it
/// could not be loaded.
pub type BenchInstance = (String, Result<Instance, String>);

/// Runs every `(instance, config, seed)` cell. Cells execute on the rayon
/// pool; rows come back in instance, config, seed order.
pub fn bench(
    instances: &[BenchInstance],
    configs: &[(String, SearchConfig)],
    seeds: &[u64],
    construction: &ConstructionConfig,
) -> RunReport {
    let cells: Vec<(usize, usize, u64)> = (0..instances.len())
        .flat_map(|i| (0..configs.len()).flat_map(move |c| seeds.iter().map(move |&s| (i, c, s))))
        .collect();
    let rows = cells
        .into_par_iter()
        .map(|(i, c, seed)| {
            let (name, instance) = &instances[i];
            let (config_name, template) = &configs[c];
            let outcome = instance.as_ref().map_err(Clone::clone).and_then(|inst| {
                let config = SearchConfig {
                    seed,
                    ..template.clone()
                };
                solve(inst, construction, &config)
                    .map(|o| RunStats {
                        hc: o.search.best_eval.hc,
                        sc: o.search.best_eval.sc,
                        evaluations: o.search.evaluations,
                        elapsed: o.search.elapsed,
                        construction_loops: o.construction_loops,
                    })
                    .map_err(|e| e.to_string())
            });
            RunRow {
                instance: name.clone(),
                config: config_name.clone(),
                seed,
                outcome,
            }
        })
        .collect();
    RunReport { rows }
}
