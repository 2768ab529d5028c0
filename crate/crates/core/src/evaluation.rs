//! Lexicographic objective `(hc, sc)` and its incremental maintenance.
//!
//! `hc` is the number of unassigned events. `sc` is the weighted sum of the
//! four soft penalties:
//!
//! | component              | weight | counted                                           |
//! |------------------------|--------|---------------------------------------------------|
//! | room capacity          | 1      | per placed event, students above capacity         |
//! | minimum working days   | 5      | per course, days short of the minimum             |
//! | curriculum compactness | 2      | per curriculum lecture with no adjacent lecture   |
//! | room stability         | 1      | per course, distinct rooms beyond the first       |
//!
//! While events are unassigned, working days and compactness are computed over
//! the placed events only; a course with nothing placed is short by its full
//! minimum. Adjacency never crosses a day boundary.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::model::{AssignError, Clause, CourseId, EventId, Instance, Timeslot, Timetable};

pub const ROOM_CAPACITY_WEIGHT: u64 = 1;
pub const MIN_WORKING_DAYS_WEIGHT: u64 = 5;
pub const COMPACTNESS_WEIGHT: u64 = 2;
pub const ROOM_STABILITY_WEIGHT: u64 = 1;

/// Distance to feasibility first, soft penalty second.
///
/// The derived ordering is lexicographic on `(hc, sc)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Evaluation {
    pub hc: usize,
    pub sc: u64,
}

impl Evaluation {
    pub fn new(hc: usize, sc: u64) -> Self {
        Self { hc, sc }
    }
}

impl fmt::Display for Evaluation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "hc={} sc={}", self.hc, self.sc)
    }
}

/// `Less` when `a` is the better evaluation.
pub fn compare_lex(a: Evaluation, b: Evaluation) -> Ordering {
    a.hc.cmp(&b.hc).then(a.sc.cmp(&b.sc))
}

/// Weighted penalty of each soft constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SoftBreakdown {
    pub room_capacity: u64,
    pub min_working_days: u64,
    pub curriculum_compactness: u64,
    pub room_stability: u64,
}

impl SoftBreakdown {
    pub fn total(&self) -> u64 {
        self.room_capacity
            + self.min_working_days
            + self.curriculum_compactness
            + self.room_stability
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{clause} violation involving events {events:?}")]
pub struct HardViolation {
    pub clause: Clause,
    pub events: Vec<EventId>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvaluationError {
    #[error("assignment is not hard-feasible: {0}")]
    Infeasible(HardViolation),
    #[error("event {0} placed more than once")]
    DuplicateEvent(EventId),
}

/// Lists every hard violation in a raw list of placements.
///
/// Room clashes are reported once per overbooked cell and same-course clashes
/// once per course and period; curriculum or teacher conflicts are reported
/// per offending pair of events.
pub fn validate_hard(
    instance: &Instance,
    placements: &[(EventId, Timeslot)],
) -> Vec<HardViolation> {
    let mut violations = Vec::new();
    let n_periods = instance.periods();
    let n_rooms = instance.rooms().len();

    let mut by_cell: Vec<Vec<EventId>> = vec![Vec::new(); n_periods * n_rooms];
    let mut by_period: Vec<Vec<EventId>> = vec![Vec::new(); n_periods];
    for &(event, slot) in placements {
        let t = slot.day * instance.periods_per_day() + slot.period;
        by_cell[t * n_rooms + slot.room].push(event);
        by_period[t].push(event);
        let course = instance.course_of(event);
        if instance.is_unavailable(course, slot.day, slot.period) {
            violations.push(HardViolation {
                clause: Clause::Availability,
                events: vec![event],
            });
        }
    }
    for cell in by_cell.iter().filter(|c| c.len() > 1) {
        violations.push(HardViolation {
            clause: Clause::RoomOccupancy,
            events: cell.clone(),
        });
    }
    for events in &by_period {
        let mut per_course: Vec<(CourseId, Vec<EventId>)> = Vec::new();
        for &e in events {
            let c = instance.course_of(e);
            match per_course.iter_mut().find(|(k, _)| *k == c) {
                Some((_, list)) => list.push(e),
                None => per_course.push((c, vec![e])),
            }
        }
        for (_, list) in per_course.iter().filter(|(_, l)| l.len() > 1) {
            violations.push(HardViolation {
                clause: Clause::SameCourse,
                events: list.clone(),
            });
        }
        for (i, &a) in events.iter().enumerate() {
            for &b in &events[i + 1..] {
                let (ca, cb) = (instance.course_of(a), instance.course_of(b));
                if ca != cb && instance.courses_conflict(ca, cb) {
                    violations.push(HardViolation {
                        clause: Clause::Conflict,
                        events: vec![a, b],
                    });
                }
            }
        }
    }
    violations
}

/// Evaluates a hard-feasible timetable from scratch.
pub fn evaluate_full(instance: &Instance, timetable: &Timetable) -> (Evaluation, SoftBreakdown) {
    let placements: Vec<(EventId, Timeslot)> = timetable.placements().collect();
    let breakdown = soft_breakdown(instance, &placements);
    (
        Evaluation::new(timetable.unassigned_count(), breakdown.total()),
        breakdown,
    )
}

/// Evaluates raw placements, refusing hard-infeasible input.
pub fn evaluate_placements(
    instance: &Instance,
    placements: &[(EventId, Timeslot)],
) -> Result<(Evaluation, SoftBreakdown), EvaluationError> {
    let mut seen = vec![false; instance.event_count()];
    for &(e, _) in placements {
        if std::mem::replace(&mut seen[e], true) {
            return Err(EvaluationError::DuplicateEvent(e));
        }
    }
    if let Some(v) = validate_hard(instance, placements).into_iter().next() {
        return Err(EvaluationError::Infeasible(v));
    }
    let breakdown = soft_breakdown(instance, placements);
    Ok((
        Evaluation::new(instance.event_count() - placements.len(), breakdown.total()),
        breakdown,
    ))
}

fn soft_breakdown(instance: &Instance, placements: &[(EventId, Timeslot)]) -> SoftBreakdown {
    let n_courses = instance.courses().len();
    let n_rooms = instance.rooms().len();
    let days = instance.days();
    let ppd = instance.periods_per_day();

    let mut out = SoftBreakdown::default();
    let mut used_day = vec![false; n_courses * days];
    let mut used_room = vec![false; n_courses * n_rooms];
    let mut occupied = vec![false; instance.curricula().len() * days * ppd];

    for &(event, slot) in placements {
        let c = instance.course_of(event);
        let students = instance.courses()[c].students;
        let capacity = instance.rooms()[slot.room].capacity;
        out.room_capacity += students.saturating_sub(capacity) as u64 * ROOM_CAPACITY_WEIGHT;
        used_day[c * days + slot.day] = true;
        used_room[c * n_rooms + slot.room] = true;
        for &q in instance.course_curricula(c) {
            occupied[(q * days + slot.day) * ppd + slot.period] = true;
        }
    }

    for (c, course) in instance.courses().iter().enumerate() {
        // courses with nothing placed yet owe nothing
        let day_count = used_day[c * days..(c + 1) * days]
            .iter()
            .filter(|&&d| d)
            .count();
        if day_count > 0 {
            out.min_working_days +=
                course.min_working_days.saturating_sub(day_count) as u64 * MIN_WORKING_DAYS_WEIGHT;
        }
        let room_count = used_room[c * n_rooms..(c + 1) * n_rooms]
            .iter()
            .filter(|&&r| r)
            .count();
        out.room_stability += room_count.saturating_sub(1) as u64 * ROOM_STABILITY_WEIGHT;
    }

    for q in 0..instance.curricula().len() {
        for day in 0..days {
            let row = &occupied[(q * days + day) * ppd..(q * days + day + 1) * ppd];
            for p in 0..ppd {
                let left = p > 0 && row[p - 1];
                let right = p + 1 < ppd && row[p + 1];
                if row[p] && !left && !right {
                    out.curriculum_compactness += COMPACTNESS_WEIGHT;
                }
            }
        }
    }
    out
}

/// Timetable plus the counters needed to update `sc` per placed or removed
/// event in time proportional to the course's curricula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncrementalState {
    timetable: Timetable,
    // [curriculum][period index]
    curriculum_load: Vec<u16>,
    // [course][day]
    course_day: Vec<u16>,
    distinct_days: Vec<u16>,
    // [course][room]
    course_room: Vec<u16>,
    distinct_rooms: Vec<u16>,
    breakdown: SoftBreakdown,
}

impl IncrementalState {
    /// State for an empty timetable.
    pub fn new(instance: &Instance) -> Self {
        let n_courses = instance.courses().len();
        Self {
            timetable: Timetable::new(instance),
            curriculum_load: vec![0; instance.curricula().len() * instance.periods()],
            course_day: vec![0; n_courses * instance.days()],
            distinct_days: vec![0; n_courses],
            course_room: vec![0; n_courses * instance.rooms().len()],
            distinct_rooms: vec![0; n_courses],
            breakdown: SoftBreakdown::default(),
        }
    }

    /// Loads an existing timetable.
    pub fn from_timetable(instance: &Instance, timetable: &Timetable) -> Self {
        let mut state = Self::new(instance);
        for (event, slot) in timetable.placements() {
            state.record_assign(instance, event, slot);
            state.timetable.place(instance, event, slot);
        }
        state
    }

    pub fn timetable(&self) -> &Timetable {
        &self.timetable
    }

    pub fn into_timetable(self) -> Timetable {
        self.timetable
    }

    pub fn breakdown(&self) -> SoftBreakdown {
        self.breakdown
    }

    pub fn sc(&self) -> u64 {
        self.breakdown.total()
    }

    pub fn hc(&self) -> usize {
        self.timetable.unassigned_count()
    }

    pub fn evaluation(&self) -> Evaluation {
        Evaluation::new(self.hc(), self.sc())
    }

    /// Places `event` at `slot` and returns the change in `sc`.
    pub fn apply_assign(
        &mut self,
        instance: &Instance,
        event: EventId,
        slot: Timeslot,
    ) -> Result<i64, AssignError> {
        self.timetable.assign(instance, event, slot)?;
        Ok(self.record_assign(instance, event, slot))
    }

    /// Removes `event` from the timetable and returns the change in `sc`.
    pub fn apply_remove(
        &mut self,
        instance: &Instance,
        event: EventId,
    ) -> Result<i64, AssignError> {
        let slot = self.timetable.unassign(instance, event)?;
        Ok(self.record_remove(instance, event, slot))
    }

    /// Unchecked variant for callers that only pick available slots.
    pub(crate) fn place(&mut self, instance: &Instance, event: EventId, slot: Timeslot) -> i64 {
        self.timetable.place(instance, event, slot);
        self.record_assign(instance, event, slot)
    }

    pub(crate) fn displace(&mut self, instance: &Instance, event: EventId) -> (Timeslot, i64) {
        let slot = self.timetable.displace(instance, event);
        (slot, self.record_remove(instance, event, slot))
    }

    fn record_assign(&mut self, instance: &Instance, event: EventId, slot: Timeslot) -> i64 {
        self.record(instance, event, slot, true)
    }

    fn record_remove(&mut self, instance: &Instance, event: EventId, slot: Timeslot) -> i64 {
        self.record(instance, event, slot, false)
    }

    fn record(&mut self, instance: &Instance, event: EventId, slot: Timeslot, add: bool) -> i64 {
        let sign: i64 = if add { 1 } else { -1 };
        let c = instance.course_of(event);
        let course = &instance.courses()[c];
        let n_rooms = instance.rooms().len();
        let days = instance.days();
        let ppd = instance.periods_per_day();
        let mut delta = SignedBreakdown::default();

        let overflow = course
            .students
            .saturating_sub(instance.rooms()[slot.room].capacity) as i64;
        delta.room_capacity = sign * overflow * ROOM_CAPACITY_WEIGHT as i64;

        let min_days = course.min_working_days as i64;
        let shortfall = |distinct: u16| {
            if distinct == 0 {
                0
            } else {
                (min_days - distinct as i64).max(0)
            }
        };
        let before = shortfall(self.distinct_days[c]);
        let cd = &mut self.course_day[c * days + slot.day];
        if add {
            *cd += 1;
            if *cd == 1 {
                self.distinct_days[c] += 1;
            }
        } else {
            *cd -= 1;
            if *cd == 0 {
                self.distinct_days[c] -= 1;
            }
        }
        delta.min_working_days =
            (shortfall(self.distinct_days[c]) - before) * MIN_WORKING_DAYS_WEIGHT as i64;

        let extra = |distinct: u16| (distinct as i64 - 1).max(0);
        let before = extra(self.distinct_rooms[c]);
        let cr = &mut self.course_room[c * n_rooms + slot.room];
        if add {
            *cr += 1;
            if *cr == 1 {
                self.distinct_rooms[c] += 1;
            }
        } else {
            *cr -= 1;
            if *cr == 0 {
                self.distinct_rooms[c] -= 1;
            }
        }
        delta.room_stability =
            (extra(self.distinct_rooms[c]) - before) * ROOM_STABILITY_WEIGHT as i64;

        let n_periods = instance.periods();
        let t = slot.day * ppd + slot.period;
        let lo = if slot.period > 0 { t - 1 } else { t };
        let hi = if slot.period + 1 < ppd { t + 1 } else { t };
        for &q in instance.course_curricula(c) {
            let row = &mut self.curriculum_load[q * n_periods..(q + 1) * n_periods];
            let before = isolated_in(row, lo, hi, ppd);
            if add {
                row[t] += 1;
            } else {
                row[t] -= 1;
            }
            let after = isolated_in(row, lo, hi, ppd);
            delta.curriculum_compactness += (after - before) * COMPACTNESS_WEIGHT as i64;
        }

        self.breakdown = delta.apply(self.breakdown);
        delta.total()
    }
}

/// Isolated lectures of one curriculum at periods `lo..=hi` (all in one day).
#[inline]
fn isolated_in(row: &[u16], lo: usize, hi: usize, ppd: usize) -> i64 {
    let mut n = 0;
    for u in lo..=hi {
        if row[u] == 0 {
            continue;
        }
        let p = u % ppd;
        let left = p > 0 && row[u - 1] > 0;
        let right = p + 1 < ppd && row[u + 1] > 0;
        if !left && !right {
            n += row[u] as i64;
        }
    }
    n
}

#[derive(Default)]
struct SignedBreakdown {
    room_capacity: i64,
    min_working_days: i64,
    curriculum_compactness: i64,
    room_stability: i64,
}

impl SignedBreakdown {
    fn total(&self) -> i64 {
        self.room_capacity
            + self.min_working_days
            + self.curriculum_compactness
            + self.room_stability
    }

    fn apply(&self, b: SoftBreakdown) -> SoftBreakdown {
        let add = |v: u64, d: i64| (v as i64 + d) as u64;
        SoftBreakdown {
            room_capacity: add(b.room_capacity, self.room_capacity),
            min_working_days: add(b.min_working_days, self.min_working_days),
            curriculum_compactness: add(b.curriculum_compactness, self.curriculum_compactness),
            room_stability: add(b.room_stability, self.room_stability),
        }
    }
}
