//! Random instances and timetables for tests and throughput measurements.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::model::{
    Course, Curriculum, EventId, Instance, Room, Timeslot, Timetable, Unavailability,
};

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorParams {
    pub courses: usize,
    /// Exact total number of lectures, spread over the courses (each gets at least one).
    pub lectures: usize,
    pub teachers: usize,
    pub rooms: usize,
    pub days: usize,
    pub periods_per_day: usize,
    pub curricula: usize,
    pub max_curriculum_size: usize,
    /// Chance that a given course/period pair is unavailable.
    pub unavailability_rate: f64,
    pub max_students: usize,
    pub min_capacity: usize,
    pub max_capacity: usize,
}

impl GeneratorParams {
    /// Draws the dimensions of a tiny instance: at most 5 courses, 3 rooms,
    /// 3 days and 4 periods per day.
    pub fn tiny<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let courses = rng.random_range(1..=5);
        let days = rng.random_range(1..=3);
        let periods_per_day = rng.random_range(1..=4);
        Self {
            courses,
            lectures: rng.random_range(courses..=courses * 3),
            teachers: rng.random_range(1..=courses),
            rooms: rng.random_range(1..=3),
            days,
            periods_per_day,
            curricula: rng.random_range(0..=3),
            max_curriculum_size: 3,
            unavailability_rate: rng.random_range(0.0..0.3),
            max_students: 60,
            min_capacity: 10,
            max_capacity: 60,
        }
    }

    /// 50 lectures on a 5x4 grid with 4 rooms.
    pub fn medium() -> Self {
        Self {
            courses: 14,
            lectures: 50,
            teachers: 10,
            rooms: 4,
            days: 5,
            periods_per_day: 4,
            curricula: 6,
            max_curriculum_size: 4,
            unavailability_rate: 0.1,
            max_students: 120,
            min_capacity: 20,
            max_capacity: 150,
        }
    }

    /// Same dimensions as the first competition instance: 30 courses,
    /// 160 lectures, 6 rooms, 5 days of 6 periods, 14 curricula.
    pub fn comp01_like() -> Self {
        Self {
            courses: 30,
            lectures: 160,
            teachers: 24,
            rooms: 6,
            days: 5,
            periods_per_day: 6,
            curricula: 14,
            max_curriculum_size: 6,
            unavailability_rate: 0.06,
            max_students: 230,
            min_capacity: 30,
            max_capacity: 250,
        }
    }
}

pub fn random_instance<R: Rng + ?Sized>(params: &GeneratorParams, rng: &mut R) -> Instance {
    assert!(params.courses >= 1 && params.lectures >= params.courses);
    let mut lectures = vec![1usize; params.courses];
    for _ in params.courses..params.lectures {
        lectures[rng.random_range(0..params.courses)] += 1;
    }
    let courses: Vec<Course> = lectures
        .iter()
        .enumerate()
        .map(|(i, &l)| Course {
            id: format!("c{i}"),
            teacher: format!("t{}", rng.random_range(0..params.teachers.max(1))),
            lectures: l,
            min_working_days: rng.random_range(1..=l.min(params.days)),
            students: rng.random_range(0..=params.max_students),
        })
        .collect();
    let rooms = (0..params.rooms)
        .map(|i| Room {
            id: format!("r{i}"),
            capacity: rng.random_range(params.min_capacity..=params.max_capacity),
        })
        .collect();
    let all: Vec<usize> = (0..params.courses).collect();
    let curricula = (0..params.curricula)
        .map(|i| {
            let size = rng.random_range(1..=params.max_curriculum_size.min(params.courses));
            let mut members: Vec<usize> = all.choose_multiple(rng, size).copied().collect();
            members.sort_unstable();
            Curriculum {
                id: format!("q{i}"),
                courses: members,
            }
        })
        .collect();
    let mut unavailability = Vec::new();
    for course in 0..params.courses {
        for day in 0..params.days {
            for period in 0..params.periods_per_day {
                if rng.random_bool(params.unavailability_rate) {
                    unavailability.push(Unavailability {
                        course,
                        day,
                        period,
                    });
                }
            }
        }
    }
    Instance::new(
        "generated",
        params.days,
        params.periods_per_day,
        courses,
        rooms,
        curricula,
        unavailability,
    )
    .expect("generator respects instance invariants")
}

/// Generates an instance together with a complete hard-feasible timetable
/// for it. A hidden schedule is drawn first; teachers, curricula and
/// unavailability are then chosen so that the schedule stays feasible.
///
/// Lecture totals may fall short of `params.lectures` when the grid cannot
/// hold them with distinct periods per course.
pub fn planted_instance<R: Rng + ?Sized>(
    params: &GeneratorParams,
    rng: &mut R,
) -> (Instance, Timetable) {
    let periods = params.days * params.periods_per_day;
    assert!(params.courses >= 1 && params.rooms >= 1 && periods >= 1);
    let mut lectures = vec![1usize; params.courses];
    for _ in params.courses..params.lectures {
        lectures[rng.random_range(0..params.courses)] += 1;
    }

    // rooms still free per period in the hidden schedule
    let mut free = vec![params.rooms; periods];
    let mut hidden: Vec<Vec<(usize, usize)>> = Vec::with_capacity(params.courses);
    for &want in &lectures {
        let mut open: Vec<usize> = (0..periods).filter(|&t| free[t] > 0).collect();
        open.shuffle(rng);
        open.truncate(want);
        let cells: Vec<(usize, usize)> = open
            .into_iter()
            .map(|t| {
                free[t] -= 1;
                (t, params.rooms - free[t] - 1)
            })
            .collect();
        if !cells.is_empty() {
            hidden.push(cells);
        }
    }
    let n = hidden.len();
    let busy: Vec<Vec<bool>> = hidden
        .iter()
        .map(|cells| {
            let mut row = vec![false; periods];
            for &(t, _) in cells {
                row[t] = true;
            }
            row
        })
        .collect();
    let disjoint = |a: usize, b: usize| (0..periods).all(|t| !(busy[a][t] && busy[b][t]));

    let mut teacher_of = Vec::with_capacity(n);
    let mut teachers: Vec<Vec<usize>> = Vec::new();
    for c in 0..n {
        let mut candidates: Vec<usize> = (0..teachers.len())
            .filter(|&t| teachers[t].iter().all(|&o| disjoint(c, o)))
            .collect();
        if teachers.len() < params.teachers.max(1) {
            candidates.push(teachers.len());
        }
        let t = candidates.choose(rng).copied().unwrap_or(teachers.len());
        if t == teachers.len() {
            teachers.push(Vec::new());
        }
        teachers[t].push(c);
        teacher_of.push(t);
    }

    let mut curricula = Vec::new();
    for q in 0..params.curricula {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let size = rng.random_range(1..=params.max_curriculum_size.max(1));
        let mut members: Vec<usize> = Vec::new();
        for c in order {
            if members.len() == size {
                break;
            }
            if members.iter().all(|&m| disjoint(c, m)) {
                members.push(c);
            }
        }
        members.sort_unstable();
        curricula.push(Curriculum {
            id: format!("q{q}"),
            courses: members,
        });
    }

    let mut unavailability = Vec::new();
    for (c, row) in busy.iter().enumerate() {
        for (t, &b) in row.iter().enumerate() {
            if !b && rng.random_bool(params.unavailability_rate) {
                unavailability.push(Unavailability {
                    course: c,
                    day: t / params.periods_per_day,
                    period: t % params.periods_per_day,
                });
            }
        }
    }

    let courses = hidden
        .iter()
        .enumerate()
        .map(|(c, cells)| Course {
            id: format!("c{c}"),
            teacher: format!("t{}", teacher_of[c]),
            lectures: cells.len(),
            min_working_days: rng.random_range(1..=cells.len().min(params.days)),
            students: rng.random_range(0..=params.max_students),
        })
        .collect();
    let rooms = (0..params.rooms)
        .map(|i| Room {
            id: format!("r{i}"),
            capacity: rng.random_range(params.min_capacity..=params.max_capacity),
        })
        .collect();
    let instance = Instance::new(
        "planted",
        params.days,
        params.periods_per_day,
        courses,
        rooms,
        curricula,
        unavailability,
    )
    .expect("generator respects instance invariants");

    let mut tt = Timetable::new(&instance);
    for (c, cells) in hidden.iter().enumerate() {
        for (e, &(t, room)) in instance.course_events(c).zip(cells) {
            let slot = Timeslot::new(t / params.periods_per_day, t % params.periods_per_day, room);
            tt.assign(&instance, e, slot)
                .expect("planted schedule is feasible");
        }
    }
    (instance, tt)
}

/// Visits the events in random order and places each at a uniformly random
/// available cell with probability `fill`; the result is always hard-feasible.
pub fn random_timetable<R: Rng + ?Sized>(instance: &Instance, fill: f64, rng: &mut R) -> Timetable {
    let mut tt = Timetable::new(instance);
    let mut order: Vec<EventId> = (0..instance.event_count()).collect();
    order.shuffle(rng);
    for e in order {
        if !rng.random_bool(fill) {
            continue;
        }
        let slots = crate::model::available_timeslots(instance, &tt, e);
        if !slots.is_empty() {
            let slot = slots[rng.random_range(0..slots.len())];
            tt.assign(instance, e, slot).expect("available slot");
        }
    }
    tt
}
