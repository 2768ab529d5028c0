#![allow(dead_code)]

//! Fixtures and a deliberately naive evaluator used as a test oracle.

use std::collections::BTreeSet;

use ctt::model::{EventId, Instance, Timeslot, Timetable};
use ctt::parse_instance;

pub const TOY1: &str = "Name: TOY1
Courses: 2
Rooms: 2
Days: 2
Periods_per_day: 2
Curricula: 1
Constraints: 1

COURSES:
c1 t1 2 2 10
c2 t2 1 1 15

ROOMS:
rA 10
rB 20

CURRICULA:
q1 2 c1 c2

UNAVAILABILITY_CONSTRAINTS:
c2 0 0

END.
";

pub fn toy1() -> Instance {
    parse_instance(TOY1).expect("TOY1 parses")
}

pub fn timetable(instance: &Instance, cells: &[(EventId, Timeslot)]) -> Timetable {
    let mut tt = Timetable::new(instance);
    for &(e, slot) in cells {
        tt.assign(instance, e, slot).expect("feasible fixture");
    }
    tt
}

/// Oracle cost components: (capacity, min days, compactness, stability).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NaiveCost {
    pub hc: usize,
    pub capacity: u64,
    pub min_days: u64,
    pub compactness: u64,
    pub stability: u64,
}

impl NaiveCost {
    pub fn sc(&self) -> u64 {
        self.capacity + self.min_days + self.compactness + self.stability
    }
}

/// Recomputes the objective straight from the definitions, by scanning every
/// pair of placements. Only public instance data is used.
pub fn naive_cost(instance: &Instance, placements: &[(EventId, Timeslot)]) -> NaiveCost {
    let course_of = |e: EventId| instance.events()[e].course;
    let mut cost = NaiveCost {
        hc: instance.event_count() - placements.len(),
        capacity: 0,
        min_days: 0,
        compactness: 0,
        stability: 0,
    };
    for &(e, slot) in placements {
        let students = instance.courses()[course_of(e)].students;
        let cap = instance.rooms()[slot.room].capacity;
        if students > cap {
            cost.capacity += (students - cap) as u64;
        }
    }
    for (c, course) in instance.courses().iter().enumerate() {
        let mine: Vec<Timeslot> = placements
            .iter()
            .filter(|&&(e, _)| course_of(e) == c)
            .map(|&(_, s)| s)
            .collect();
        if mine.is_empty() {
            continue;
        }
        let days: BTreeSet<usize> = mine.iter().map(|s| s.day).collect();
        let rooms: BTreeSet<usize> = mine.iter().map(|s| s.room).collect();
        if course.min_working_days > days.len() {
            cost.min_days += 5 * (course.min_working_days - days.len()) as u64;
        }
        cost.stability += (rooms.len() - 1) as u64;
    }
    for curriculum in instance.curricula() {
        let members: Vec<Timeslot> = placements
            .iter()
            .filter(|&&(e, _)| curriculum.courses.contains(&course_of(e)))
            .map(|&(_, s)| s)
            .collect();
        for a in &members {
            let neighbour = members
                .iter()
                .any(|b| b.day == a.day && (b.period + 1 == a.period || a.period + 1 == b.period));
            if !neighbour {
                cost.compactness += 2;
            }
        }
    }
    cost
}

/// Pairwise check of the four hard clauses.
pub fn naive_feasible(instance: &Instance, placements: &[(EventId, Timeslot)]) -> bool {
    let course_of = |e: EventId| instance.events()[e].course;
    for &(e, s) in placements {
        let c = course_of(e);
        if instance
            .unavailability()
            .iter()
            .any(|u| u.course == c && u.day == s.day && u.period == s.period)
        {
            return false;
        }
    }
    for (i, &(e1, s1)) in placements.iter().enumerate() {
        for &(e2, s2) in &placements[i + 1..] {
            if s1 == s2 {
                return false;
            }
            if s1.day != s2.day || s1.period != s2.period {
                continue;
            }
            let (c1, c2) = (course_of(e1), course_of(e2));
            let same_teacher = instance.courses()[c1].teacher == instance.courses()[c2].teacher;
            let shared = instance
                .curricula()
                .iter()
                .any(|q| q.courses.contains(&c1) && q.courses.contains(&c2));
            if c1 == c2 || same_teacher || shared {
                return false;
            }
        }
    }
    true
}

/// Every complete assignment of TOY1 by brute force; returns the minimum sc
/// over hard-feasible ones.
pub fn toy1_optimum(instance: &Instance) -> u64 {
    let cells: Vec<Timeslot> = (0..instance.days())
        .flat_map(|d| {
            (0..instance.periods_per_day())
                .flat_map(move |p| (0..2).map(move |r| Timeslot::new(d, p, r)))
        })
        .collect();
    let mut best = u64::MAX;
    for &a in &cells {
        for &b in &cells {
            for &c in &cells {
                let placements = [(0, a), (1, b), (2, c)];
                if naive_feasible(instance, &placements) {
                    best = best.min(naive_cost(instance, &placements).sc());
                }
            }
        }
    }
    best
}
