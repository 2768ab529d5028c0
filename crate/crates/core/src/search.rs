//! Ruin-and-recreate improvement.
//!
//! Each move unassigns `ruin_size` random events and reinserts every
//! unassigned event once, in random order, using the room-class slot rule of
//! the construction phase. The move is kept or undone in place.
//!
//! Threshold Accepting compares each candidate with the best solution found
//! so far: fewer unassigned events always wins; at equal `hc` the candidate is
//! accepted when `sc <= best.sc * (1 + threshold)`. A zero threshold is plain
//! hillclimbing. Iterated Local Search hillclimbs from its current solution
//! and, after `ils_patience` moves without a new best, applies one
//! unconditional ruin-and-recreate perturbation.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::Rng;
use thiserror::Error;

use crate::construction::SlotSelector;
use crate::evaluation::{compare_lex, Evaluation, IncrementalState};
use crate::model::{EventId, Instance, Timeslot, Timetable};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    ThresholdAccepting,
    IteratedLocalSearch,
}

/// Acceptance slack as a fraction of the reference `sc`, in basis points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Threshold {
    basis_points: u32,
}

impl Threshold {
    pub const ZERO: Threshold = Threshold { basis_points: 0 };

    pub fn from_percent(percent: u32) -> Self {
        Self {
            basis_points: percent * 100,
        }
    }

    pub fn from_basis_points(basis_points: u32) -> Self {
        Self { basis_points }
    }

    pub fn basis_points(self) -> u32 {
        self.basis_points
    }

    /// `candidate <= reference * (1 + threshold)`, compared exactly.
    pub fn accepts(self, candidate: u64, reference: u64) -> bool {
        candidate as u128 * 10_000 <= reference as u128 * (10_000 + self.basis_points as u128)
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let whole = self.basis_points / 100;
        match self.basis_points % 100 {
            0 => write!(f, "{whole}%"),
            frac => write!(f, "{whole}.{frac:02}%"),
        }
    }
}

impl FromStr for Threshold {
    type Err = String;

    /// Parses a percentage with at most two decimals, e.g. `1`, `0.5`, `2%`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().trim_end_matches('%');
        let (whole, frac) = s.split_once('.').unwrap_or((s, ""));
        if frac.len() > 2 || (whole.is_empty() && frac.is_empty()) {
            return Err(format!("invalid threshold percentage `{s}`"));
        }
        let whole: u32 = if whole.is_empty() {
            0
        } else {
            whole
                .parse()
                .map_err(|_| format!("invalid threshold percentage `{s}`"))?
        };
        let frac: u32 = if frac.is_empty() {
            0
        } else {
            format!("{frac:0<2}")
                .parse()
                .map_err(|_| format!("invalid threshold percentage `{s}`"))?
        };
        Ok(Self::from_basis_points(whole * 100 + frac))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Budget {
    Evaluations(u64),
    Time(Duration),
}

impl fmt::Display for Budget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Budget::Evaluations(n) => write!(f, "{n} evaluations"),
            Budget::Time(d) => write!(f, "{:.1}s", d.as_secs_f64()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub algorithm: Algorithm,
    pub threshold: Threshold,
    pub ruin_size: usize,
    /// Non-improving moves before an ILS perturbation; `None` never perturbs.
    pub ils_patience: Option<u64>,
    pub budget: Budget,
    pub seed: u64,
    /// Probability of preferring best-fit rooms over fitting ones on reinsertion.
    pub room_order_probability: f64,
}

impl SearchConfig {
    pub fn threshold_accepting(threshold: Threshold, budget: Budget, seed: u64) -> Self {
        Self {
            algorithm: Algorithm::ThresholdAccepting,
            threshold,
            ruin_size: 5,
            ils_patience: None,
            budget,
            seed,
            room_order_probability: 0.5,
        }
    }

    pub fn iterated_local_search(patience: u64, budget: Budget, seed: u64) -> Self {
        Self {
            algorithm: Algorithm::IteratedLocalSearch,
            threshold: Threshold::ZERO,
            ils_patience: Some(patience),
            ..Self::threshold_accepting(Threshold::ZERO, budget, seed)
        }
    }

    /// Named configurations: `ta0`, `ta1`, `ta2`, `ils10k`, `ils3k`.
    pub fn preset(name: &str, budget: Budget, seed: u64) -> Option<Self> {
        Some(match name {
            "ta0" => Self::threshold_accepting(Threshold::from_percent(0), budget, seed),
            "ta1" => Self::threshold_accepting(Threshold::from_percent(1), budget, seed),
            "ta2" => Self::threshold_accepting(Threshold::from_percent(2), budget, seed),
            "ils10k" => Self::iterated_local_search(10_000, budget, seed),
            "ils3k" => Self::iterated_local_search(3_000, budget, seed),
            _ => return None,
        })
    }

    pub const PRESETS: [&'static str; 5] = ["ta0", "ta1", "ta2", "ils10k", "ils3k"];

    pub fn validate(&self) -> Result<(), SearchError> {
        if self.ruin_size == 0 {
            return Err(SearchError::InvalidConfig(
                "ruin size must be at least 1".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.room_order_probability) {
            return Err(SearchError::InvalidConfig(
                "room order probability must lie in [0, 1]".into(),
            ));
        }
        if self.ils_patience == Some(0) {
            return Err(SearchError::InvalidConfig(
                "ILS patience must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Short human label, e.g. `TA 1%` or `ILS 3000`.
    pub fn label(&self) -> String {
        match (self.algorithm, self.ils_patience) {
            (Algorithm::ThresholdAccepting, _) => format!("TA {}", self.threshold),
            (Algorithm::IteratedLocalSearch, Some(p)) => format!("ILS {p}"),
            (Algorithm::IteratedLocalSearch, None) => "ILS".to_string(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error("configuration selects {found:?}, expected {expected:?}")]
    WrongAlgorithm {
        expected: Algorithm,
        found: Algorithm,
    },
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub best_timetable: Timetable,
    pub best_eval: Evaluation,
    pub evaluations: u64,
    pub seed: u64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveKind {
    Neighbor,
    Perturbation,
}

/// One iteration of the search, as seen by a trace observer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MoveRecord {
    pub iteration: u64,
    pub kind: MoveKind,
    pub candidate: Evaluation,
    /// Evaluation the candidate was judged against.
    pub reference: Evaluation,
    /// Best evaluation before this move.
    pub best: Evaluation,
    pub accepted: bool,
    pub new_best: bool,
}

/// Unassigns up to `k` distinct assigned events chosen uniformly at random.
///
/// Returns the removed events with the slots they held.
pub fn ruin<R: Rng + ?Sized>(
    instance: &Instance,
    state: &mut IncrementalState,
    k: usize,
    rng: &mut R,
) -> Vec<(EventId, Timeslot)> {
    let mut removed = Vec::with_capacity(k);
    ruin_into(instance, state, k, rng, &mut removed);
    removed
}

fn ruin_into<R: Rng + ?Sized>(
    instance: &Instance,
    state: &mut IncrementalState,
    k: usize,
    rng: &mut R,
    removed: &mut Vec<(EventId, Timeslot)>,
) {
    let target = k.min(state.timetable().assigned_count());
    let n = instance.event_count();
    // Rejection sampling over event indices: uniform without replacement and
    // independent of the internal order of the unassigned list.
    while removed.len() < target {
        let e = rng.random_range(0..n);
        if state.timetable().slot_of(e).is_some() {
            let (slot, _) = state.displace(instance, e);
            removed.push((e, slot));
        }
    }
}

/// Tries every unassigned event once, in uniformly random order; events with
/// no available cell stay unassigned. Returns the events placed.
pub fn recreate<R: Rng + ?Sized>(
    instance: &Instance,
    state: &mut IncrementalState,
    room_order_probability: f64,
    rng: &mut R,
) -> Vec<EventId> {
    let mut inserted = Vec::new();
    recreate_into(
        instance,
        state,
        room_order_probability,
        rng,
        &mut SlotSelector::new(),
        &mut Vec::new(),
        &mut inserted,
    );
    inserted
}

fn recreate_into<R: Rng + ?Sized>(
    instance: &Instance,
    state: &mut IncrementalState,
    room_order_probability: f64,
    rng: &mut R,
    selector: &mut SlotSelector,
    open: &mut Vec<EventId>,
    inserted: &mut Vec<EventId>,
) {
    open.clear();
    open.extend_from_slice(state.timetable().unassigned());
    open.sort_unstable();
    while !open.is_empty() {
        let event = open.swap_remove(rng.random_range(0..open.len()));
        if let Some(slot) = selector.select(
            instance,
            state.timetable(),
            event,
            room_order_probability,
            rng,
        ) {
            state.place(instance, event, slot);
            inserted.push(event);
        }
    }
}

fn undo(
    instance: &Instance,
    state: &mut IncrementalState,
    removed: &[(EventId, Timeslot)],
    inserted: &[EventId],
) {
    for &e in inserted {
        state.displace(instance, e);
    }
    for &(e, slot) in removed.iter().rev() {
        state.place(instance, e, slot);
    }
}

/// Ruin-and-recreate local search driven by a [`SearchConfig`].
pub struct Search<'a> {
    instance: &'a Instance,
    config: &'a SearchConfig,
}

impl<'a> Search<'a> {
    pub fn new(instance: &'a Instance, config: &'a SearchConfig) -> Result<Self, SearchError> {
        config.validate()?;
        Ok(Self { instance, config })
    }

    pub fn run<R: Rng + ?Sized>(&self, start: &Timetable, rng: &mut R) -> SearchResult {
        self.run_traced(start, rng, |_| {})
    }

    /// Like [`Search::run`], reporting every iteration to `observer`.
    pub fn run_traced<R, F>(&self, start: &Timetable, rng: &mut R, mut observer: F) -> SearchResult
    where
        R: Rng + ?Sized,
        F: FnMut(&MoveRecord),
    {
        let instance = self.instance;
        let config = self.config;
        let started = Instant::now();
        let ils = config.algorithm == Algorithm::IteratedLocalSearch;
        let patience = if ils { config.ils_patience } else { None };

        let mut state = IncrementalState::from_timetable(instance, start);
        let mut current = state.evaluation();
        let mut best = current;
        let mut best_timetable = start.clone();

        let mut selector = SlotSelector::new();
        let mut removed = Vec::with_capacity(config.ruin_size);
        let mut inserted = Vec::new();
        let mut open = Vec::new();
        let mut evaluations = 0u64;
        let mut stale = 0u64;

        loop {
            match config.budget {
                Budget::Evaluations(n) if evaluations >= n => break,
                Budget::Time(limit)
                    if evaluations.is_multiple_of(64) && started.elapsed() >= limit =>
                {
                    break
                }
                _ => {}
            }
            evaluations += 1;
            let perturb = patience.is_some_and(|p| stale >= p);

            removed.clear();
            inserted.clear();
            ruin_into(instance, &mut state, config.ruin_size, rng, &mut removed);
            recreate_into(
                instance,
                &mut state,
                config.room_order_probability,
                rng,
                &mut selector,
                &mut open,
                &mut inserted,
            );
            let candidate = state.evaluation();

            let reference = if ils { current } else { best };
            let accepted = perturb
                || candidate.hc < reference.hc
                || (candidate.hc == reference.hc
                    && config.threshold.accepts(candidate.sc, reference.sc));
            let new_best = compare_lex(candidate, best).is_lt();

            observer(&MoveRecord {
                iteration: evaluations,
                kind: if perturb {
                    MoveKind::Perturbation
                } else {
                    MoveKind::Neighbor
                },
                candidate,
                reference,
                best,
                accepted,
                new_best,
            });

            if accepted {
                current = candidate;
                if new_best {
                    best = candidate;
                    best_timetable = state.timetable().clone();
                }
            } else {
                undo(instance, &mut state, &removed, &inserted);
            }

            stale = if new_best || perturb { 0 } else { stale + 1 };
        }

        SearchResult {
            best_timetable,
            best_eval: best,
            evaluations,
            seed: config.seed,
            elapsed: started.elapsed(),
        }
    }
}

/// Threshold Accepting against the global best.
pub fn ta_search<R: Rng + ?Sized>(
    instance: &Instance,
    start: &Timetable,
    config: &SearchConfig,
    rng: &mut R,
) -> Result<SearchResult, SearchError> {
    expect_algorithm(config, Algorithm::ThresholdAccepting)?;
    Ok(Search::new(instance, config)?.run(start, rng))
}

/// Hillclimbing with periodic unconditional perturbation.
pub fn ils_search<R: Rng + ?Sized>(
    instance: &Instance,
    start: &Timetable,
    config: &SearchConfig,
    rng: &mut R,
) -> Result<SearchResult, SearchError> {
    expect_algorithm(config, Algorithm::IteratedLocalSearch)?;
    Ok(Search::new(instance, config)?.run(start, rng))
}

fn expect_algorithm(config: &SearchConfig, expected: Algorithm) -> Result<(), SearchError> {
    if config.algorithm != expected {
        return Err(SearchError::WrongAlgorithm {
            expected,
            found: config.algorithm,
        });
    }
    Ok(())
}
