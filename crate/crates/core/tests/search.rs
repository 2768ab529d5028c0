mod common;

use common::{naive_feasible, timetable, toy1, toy1_optimum};
use ctt::construction::{reactive_construct, ConstructionConfig};
use ctt::generate::{planted_instance, random_instance, random_timetable, GeneratorParams};
use ctt::model::{Course, Instance, Room, Timeslot, Timetable};
use ctt::search::{recreate, ruin, Algorithm, MoveKind, MoveRecord, Search};
use ctt::{
    evaluate_full, harness, ils_search, parse_instance, ta_search, write_solution, Budget,
    Evaluation, IncrementalState, SearchConfig, Threshold,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Twenty single-lecture courses filling a single-room 5x4 grid.
fn twenty_events() -> (Instance, Timetable) {
    let courses = (0..20)
        .map(|i| Course {
            id: format!("c{i}"),
            teacher: format!("t{i}"),
            lectures: 1,
            min_working_days: 1,
            students: 10,
        })
        .collect();
    let rooms = vec![Room {
        id: "r".into(),
        capacity: 10,
    }];
    let inst = Instance::new("twenty", 5, 4, courses, rooms, vec![], vec![]).unwrap();
    let cells: Vec<_> = (0..20)
        .map(|e| (e, Timeslot::new(e / 4, e % 4, 0)))
        .collect();
    let tt = timetable(&inst, &cells);
    (inst, tt)
}

/// TOY1 plus a small course c3, with c2 also unavailable at (1,0).
fn toy1_plus_c3() -> String {
    common::TOY1
        .replace("Courses: 2", "Courses: 3")
        .replace("Constraints: 1", "Constraints: 2")
        .replace("c2 t2 1 1 15\n", "c2 t2 1 1 15\nc3 t3 1 1 5\n")
        .replace("c2 0 0\n", "c2 0 0\nc2 1 0\n")
}

fn medium(seed: u64) -> (Instance, Timetable) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inst = random_instance(&GeneratorParams::medium(), &mut rng);
    let start = reactive_construct(&inst, &ConstructionConfig::default(), &mut rng).timetable;
    (inst, start)
}

fn trace(
    inst: &Instance,
    start: &Timetable,
    config: &SearchConfig,
    seed: u64,
) -> (Vec<MoveRecord>, Evaluation) {
    let mut records = Vec::new();
    let search = Search::new(inst, config).unwrap();
    let result = search.run_traced(start, &mut ChaCha8Rng::seed_from_u64(seed), |r| {
        records.push(*r)
    });
    (records, result.best_eval)
}

#[test]
fn ruin_removes_everything_when_k_exceeds_assigned() {
    let inst = toy1();
    let tt = timetable(
        &inst,
        &[
            (0, Timeslot::new(0, 0, 0)),
            (1, Timeslot::new(1, 0, 0)),
            (2, Timeslot::new(0, 1, 1)),
        ],
    );
    let mut state = IncrementalState::from_timetable(&inst, &tt);
    let removed = ruin(&inst, &mut state, 5, &mut ChaCha8Rng::seed_from_u64(0));
    assert_eq!(removed.len(), 3);
    assert_eq!(state.evaluation(), Evaluation::new(3, 0));
}

#[test]
fn ruin_removes_exactly_k() {
    let (inst, start) = medium(1);
    let mut state = IncrementalState::from_timetable(&inst, &start);
    let assigned = state.timetable().assigned_count();
    let removed = ruin(&inst, &mut state, 5, &mut ChaCha8Rng::seed_from_u64(2));
    assert_eq!(removed.len(), 5);
    assert_eq!(state.timetable().assigned_count(), assigned - 5);
    let mut events: Vec<_> = removed.iter().map(|r| r.0).collect();
    events.sort_unstable();
    events.dedup();
    assert_eq!(events.len(), 5);
    for (e, slot) in removed {
        assert_eq!(start.slot_of(e), Some(slot));
    }
}

#[test]
fn ruin_picks_events_uniformly() {
    let (inst, tt) = twenty_events();
    let mut state = IncrementalState::from_timetable(&inst, &tt);
    let mut rng = ChaCha8Rng::seed_from_u64(10_000);
    let mut hits = [0u32; 20];
    let trials = 10_000;
    for _ in 0..trials {
        let removed = ruin(&inst, &mut state, 5, &mut rng);
        for &(e, slot) in &removed {
            hits[e] += 1;
            state.apply_assign(&inst, e, slot).unwrap();
        }
    }
    let p = 0.25;
    let sigma = (p * (1.0 - p) / trials as f64).sqrt();
    for (e, &h) in hits.iter().enumerate() {
        let freq = h as f64 / trials as f64;
        assert!((freq - p).abs() <= 3.0 * sigma, "event {e}: {freq}");
    }
}

#[test]
fn recreate_on_full_timetable_is_identity() {
    let (inst, tt) = twenty_events();
    let mut state = IncrementalState::from_timetable(&inst, &tt);
    let inserted = recreate(&inst, &mut state, 0.5, &mut ChaCha8Rng::seed_from_u64(0));
    assert!(inserted.is_empty());
    assert_eq!(state.timetable(), &tt);
}

#[test]
fn recreate_reinserts_into_the_only_free_cell() {
    // c2 may only use period 1; c1 blocks day 1 and c3 holds rA on day 0
    let inst = parse_instance(&toy1_plus_c3()).unwrap();
    let tt = timetable(
        &inst,
        &[
            (0, Timeslot::new(0, 0, 1)),
            (1, Timeslot::new(1, 1, 1)),
            (2, Timeslot::new(0, 1, 1)),
            (3, Timeslot::new(0, 1, 0)),
        ],
    );
    for seed in 0..20 {
        let mut state = IncrementalState::from_timetable(&inst, &tt);
        let before = state.sc();
        let d = state.apply_remove(&inst, 2).unwrap();
        let inserted = recreate(&inst, &mut state, 0.5, &mut ChaCha8Rng::seed_from_u64(seed));
        assert_eq!(inserted, vec![2]);
        assert_eq!(state.timetable().slot_of(2), Some(Timeslot::new(0, 1, 1)));
        assert_eq!(state.sc(), before);
        assert_ne!(d, 0);
    }
}

#[test]
fn recreate_keeps_unplaceable_events_unassigned() {
    let inst = parse_instance(&toy1_plus_c3()).unwrap();
    // c1 takes period 1 of both days, the only periods c2 may use
    let tt = timetable(
        &inst,
        &[(0, Timeslot::new(0, 1, 0)), (1, Timeslot::new(1, 1, 0))],
    );
    let mut state = IncrementalState::from_timetable(&inst, &tt);
    let inserted = recreate(&inst, &mut state, 0.5, &mut ChaCha8Rng::seed_from_u64(3));
    assert_eq!(inserted, vec![3]);
    assert_eq!(state.timetable().unassigned(), &[2]);
}

#[test]
fn ruin_and_recreate_usually_restores_feasibility() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (inst, _) = planted_instance(&GeneratorParams::comp01_like(), &mut rng);
    let start = reactive_construct(&inst, &ConstructionConfig::default(), &mut rng);
    assert!(start.is_feasible());
    let mut feasible = 0;
    for _ in 0..1000 {
        let mut state = IncrementalState::from_timetable(&inst, &start.timetable);
        ruin(&inst, &mut state, 5, &mut rng);
        recreate(&inst, &mut state, 0.5, &mut rng);
        if state.hc() == 0 {
            feasible += 1;
        }
    }
    assert!(feasible >= 800, "{feasible}/1000");
}

#[test]
fn threshold_boundary() {
    let t = Threshold::from_percent(1);
    assert!(t.accepts(202, 200));
    assert!(!t.accepts(203, 200));
    assert!(Threshold::ZERO.accepts(0, 0));
    assert!(!Threshold::ZERO.accepts(1, 0));
}

#[test]
fn zero_budget_returns_start() {
    let (inst, start) = medium(2);
    let config =
        SearchConfig::threshold_accepting(Threshold::from_percent(1), Budget::Evaluations(0), 0);
    let result = ta_search(&inst, &start, &config, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
    assert_eq!(result.evaluations, 0);
    assert_eq!(result.best_timetable, start);
    assert_eq!(result.best_eval, evaluate_full(&inst, &start).0);
}

#[test]
fn ta_acceptance_follows_global_best() {
    let (inst, start) = medium(3);
    let config = SearchConfig::threshold_accepting(
        Threshold::from_percent(2),
        Budget::Evaluations(20_000),
        3,
    );
    let (records, best) = trace(&inst, &start, &config, 3);
    assert_eq!(records.len(), 20_000);
    let mut running = evaluate_full(&inst, &start).0;
    for r in &records {
        assert_eq!(r.best, running);
        assert_eq!(r.reference, r.best);
        let expected = r.candidate.hc < r.best.hc
            || (r.candidate.hc == r.best.hc && r.candidate.sc * 100 <= r.best.sc * 102);
        assert_eq!(r.accepted, expected, "{r:?}");
        assert_eq!(r.new_best, r.candidate < r.best);
        if r.new_best {
            running = r.candidate;
        }
        assert_eq!(r.kind, MoveKind::Neighbor);
    }
    assert_eq!(best, running);
}

#[test]
fn candidate_hitting_fewer_unassigned_is_accepted_regardless_of_sc() {
    let (inst, start) = medium(4);
    let config = SearchConfig::threshold_accepting(Threshold::ZERO, Budget::Evaluations(5_000), 4);
    let (records, _) = trace(&inst, &start, &config, 4);
    for r in records.iter().filter(|r| r.candidate.hc < r.best.hc) {
        assert!(r.accepted && r.new_best);
    }
}

#[test]
fn ils_perturbs_after_patience_runs_out() {
    let inst = toy1();
    assert_eq!(toy1_optimum(&inst), 2);
    let optimal = timetable(
        &inst,
        &[
            (0, Timeslot::new(0, 0, 0)),
            (1, Timeslot::new(1, 0, 0)),
            (2, Timeslot::new(0, 1, 1)),
        ],
    );
    let config = SearchConfig::iterated_local_search(3, Budget::Evaluations(8), 0);
    let (records, best) = trace(&inst, &optimal, &config, 0);
    let kinds: Vec<_> = records.iter().map(|r| r.kind).collect();
    use MoveKind::{Neighbor as N, Perturbation as P};
    assert_eq!(kinds, vec![N, N, N, P, N, N, N, P]);
    assert!(records.iter().filter(|r| r.kind == P).all(|r| r.accepted));
    assert_eq!(best, Evaluation::new(0, 2));
}

#[test]
fn ils_counter_resets_on_improvement() {
    let (inst, _) = medium(5);
    let start = Timetable::new(&inst);
    let patience = 3;
    let config = SearchConfig::iterated_local_search(patience, Budget::Evaluations(5_000), 5);
    let (records, _) = trace(&inst, &start, &config, 5);
    let mut stale = 0;
    let mut improvements = 0;
    for r in &records {
        let expected = if stale >= patience {
            MoveKind::Perturbation
        } else {
            MoveKind::Neighbor
        };
        assert_eq!(r.kind, expected, "iteration {}", r.iteration);
        if r.kind == MoveKind::Perturbation {
            assert!(r.accepted);
        }
        if r.new_best {
            improvements += 1;
        }
        stale = if r.new_best || r.kind == MoveKind::Perturbation {
            0
        } else {
            stale + 1
        };
    }
    assert!(improvements > 1);
}

#[test]
fn hillclimb_equivalence_between_ta_and_ils() {
    let (inst, start) = medium(6);
    let ta = SearchConfig::threshold_accepting(Threshold::ZERO, Budget::Evaluations(20_000), 6);
    let mut ils = SearchConfig::iterated_local_search(1, Budget::Evaluations(20_000), 6);
    ils.ils_patience = None;
    assert_eq!(ils.algorithm, Algorithm::IteratedLocalSearch);
    let (ta_trace, ta_best) = trace(&inst, &start, &ta, 99);
    let (ils_trace, ils_best) = trace(&inst, &start, &ils, 99);
    assert_eq!(ta_best, ils_best);
    let strip = |t: &[MoveRecord]| {
        t.iter()
            .map(|r| (r.candidate, r.accepted, r.new_best, r.best))
            .collect::<Vec<_>>()
    };
    assert_eq!(strip(&ta_trace), strip(&ils_trace));
    let a = ta_search(&inst, &start, &ta, &mut ChaCha8Rng::seed_from_u64(99)).unwrap();
    let b = ils_search(&inst, &start, &ils, &mut ChaCha8Rng::seed_from_u64(99)).unwrap();
    assert_eq!(a.best_timetable, b.best_timetable);
}

#[test]
fn wrong_algorithm_is_rejected() {
    let (inst, start) = medium(7);
    let ta = SearchConfig::threshold_accepting(Threshold::ZERO, Budget::Evaluations(1), 0);
    assert!(ils_search(&inst, &start, &ta, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
    let ils = SearchConfig::iterated_local_search(10, Budget::Evaluations(1), 0);
    assert!(ta_search(&inst, &start, &ils, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
}

#[test]
fn search_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let inst = random_instance(&GeneratorParams::comp01_like(), &mut rng);
    for name in SearchConfig::PRESETS {
        let config = SearchConfig::preset(name, Budget::Evaluations(3_000), 42).unwrap();
        let a = harness::solve(&inst, &ConstructionConfig::default(), &config).unwrap();
        let b = harness::solve(&inst, &ConstructionConfig::default(), &config).unwrap();
        assert_eq!(a.search.evaluations, b.search.evaluations);
        assert_eq!(a.search.best_eval, b.search.best_eval);
        assert_eq!(
            write_solution(&inst, &a.search.best_timetable),
            write_solution(&inst, &b.search.best_timetable)
        );
    }
}

#[test]
fn best_is_monotone_and_feasible() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let inst = random_instance(&GeneratorParams::medium(), &mut rng);
    let start = random_timetable(&inst, 0.3, &mut rng);
    let config = SearchConfig::threshold_accepting(
        Threshold::from_percent(1),
        Budget::Evaluations(10_000),
        13,
    );
    let (records, best) = trace(&inst, &start, &config, 13);
    assert!(records.windows(2).all(|w| w[1].best <= w[0].best));
    assert!(best <= evaluate_full(&inst, &start).0);
    let result = ta_search(&inst, &start, &config, &mut ChaCha8Rng::seed_from_u64(13)).unwrap();
    let placements: Vec<_> = result.best_timetable.placements().collect();
    assert!(naive_feasible(&inst, &placements));
    assert_eq!(
        evaluate_full(&inst, &result.best_timetable).0,
        result.best_eval
    );
}

#[test]
fn toy1_search_reaches_the_optimum() {
    let inst = toy1();
    let config = SearchConfig::threshold_accepting(
        Threshold::from_percent(1),
        Budget::Evaluations(100_000),
        1,
    );
    let outcome = harness::solve(&inst, &ConstructionConfig::default(), &config).unwrap();
    assert_eq!(
        outcome.search.best_eval,
        Evaluation::new(0, toy1_optimum(&inst))
    );
}

#[test]
fn time_budget_terminates() {
    let (inst, start) = medium(14);
    let config = SearchConfig::threshold_accepting(
        Threshold::from_percent(1),
        Budget::Time(std::time::Duration::from_millis(200)),
        0,
    );
    let result = ta_search(&inst, &start, &config, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
    assert!(result.evaluations > 0);
    assert!(result.elapsed.as_secs_f64() < 5.0);
}
