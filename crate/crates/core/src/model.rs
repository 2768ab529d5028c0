//! Problem and solution data model.
//!
//! An [`Instance`] is immutable once built. It converts the string ids of the
//! input into dense indices and precomputes everything the solvers query in
//! their inner loops: the event list, the per-course room classes, the
//! conflict neighbourhood of every course and the unavailability matrix.
//!
//! A [`Timetable`] is a partial assignment of events to `(day, period, room)`
//! cells that is hard-feasible at all times. Infeasibility is never
//! materialised; an event that cannot be placed stays unassigned.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::ops::Range;

use thiserror::Error;

pub type EventId = usize;
pub type CourseId = usize;
pub type RoomId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Course {
    pub id: String,
    pub teacher: String,
    pub lectures: usize,
    pub min_working_days: usize,
    pub students: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Room {
    pub id: String,
    pub capacity: usize,
}

/// A set of courses sharing students. Members are course indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Curriculum {
    pub id: String,
    pub courses: Vec<CourseId>,
}

/// A course/day/period triple on which the course may not be taught.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Unavailability {
    pub course: CourseId,
    pub day: usize,
    pub period: usize,
}

/// One lecture occurrence of a course.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Event {
    pub index: EventId,
    pub course: CourseId,
}

/// A `(day, period, room)` cell of the timetable grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Timeslot {
    pub day: usize,
    pub period: usize,
    pub room: RoomId,
}

impl Timeslot {
    pub fn new(day: usize, period: usize, room: RoomId) -> Self {
        Self { day, period, room }
    }
}

impl fmt::Display for Timeslot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(day {}, period {}, room {})",
            self.day, self.period, self.room
        )
    }
}

/// Preference class of a room for a given course.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RoomClass {
    /// Fits with the smallest non-negative spare capacity.
    BestFit,
    /// Fits, but with more spare seats than the best fit.
    Fits,
    /// Too small; usable at a capacity penalty.
    TooSmall,
}

/// Per-course partition of the rooms into best fit, fitting and too small.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoomClassification {
    classes: Vec<[Vec<RoomId>; 3]>,
    // [course][room] -> 0, 1 or 2
    lookup: Vec<u8>,
    n_rooms: usize,
}

impl RoomClassification {
    pub fn rooms(&self, course: CourseId, class: RoomClass) -> &[RoomId] {
        let slot = match class {
            RoomClass::BestFit => 0,
            RoomClass::Fits => 1,
            RoomClass::TooSmall => 2,
        };
        &self.classes[course][slot]
    }

    pub fn class_of(&self, course: CourseId, room: RoomId) -> RoomClass {
        match self.class_index(course, room) {
            0 => RoomClass::BestFit,
            1 => RoomClass::Fits,
            _ => RoomClass::TooSmall,
        }
    }

    #[inline]
    pub(crate) fn class_index(&self, course: CourseId, room: RoomId) -> usize {
        self.lookup[course * self.n_rooms + room] as usize
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("instance needs at least one day and one period per day")]
    EmptyGrid,
    #[error("instance has no rooms")]
    NoRooms,
    #[error("duplicate {kind} id `{id}`")]
    DuplicateId { kind: &'static str, id: String },
    #[error("course `{0}` has no lectures")]
    NoLectures(String),
    #[error("course `{course}` needs {min_days} working days but the week has {days}")]
    MinWorkingDays {
        course: String,
        min_days: usize,
        days: usize,
    },
    #[error("curriculum `{0}` is empty")]
    EmptyCurriculum(String),
    #[error("curriculum `{curriculum}` references course index {course} out of range")]
    CurriculumCourse { curriculum: String, course: usize },
    #[error("unavailability ({course}, {day}, {period}) is out of range")]
    Unavailability {
        course: usize,
        day: usize,
        period: usize,
    },
}

/// Immutable problem description plus the derived lookup tables.
#[derive(Debug, Clone)]
pub struct Instance {
    name: String,
    days: usize,
    periods_per_day: usize,
    courses: Vec<Course>,
    rooms: Vec<Room>,
    curricula: Vec<Curriculum>,
    unavailability: Vec<Unavailability>,

    events: Vec<Event>,
    course_events: Vec<Range<EventId>>,
    course_curricula: Vec<Vec<usize>>,
    // Courses that may not share a period with the key course, itself included.
    conflicts: Vec<Vec<CourseId>>,
    conflict_matrix: Vec<bool>,
    unavailable: Vec<bool>,
    room_classes: RoomClassification,
}

impl Instance {
    pub fn new(
        name: impl Into<String>,
        days: usize,
        periods_per_day: usize,
        courses: Vec<Course>,
        rooms: Vec<Room>,
        curricula: Vec<Curriculum>,
        unavailability: Vec<Unavailability>,
    ) -> Result<Self, ModelError> {
        if days == 0 || periods_per_day == 0 {
            return Err(ModelError::EmptyGrid);
        }
        if rooms.is_empty() {
            return Err(ModelError::NoRooms);
        }
        check_unique("course", courses.iter().map(|c| c.id.as_str()))?;
        check_unique("room", rooms.iter().map(|r| r.id.as_str()))?;
        check_unique("curriculum", curricula.iter().map(|q| q.id.as_str()))?;
        for course in &courses {
            if course.lectures == 0 {
                return Err(ModelError::NoLectures(course.id.clone()));
            }
            if course.min_working_days == 0 || course.min_working_days > days {
                return Err(ModelError::MinWorkingDays {
                    course: course.id.clone(),
                    min_days: course.min_working_days,
                    days,
                });
            }
        }
        for q in &curricula {
            if q.courses.is_empty() {
                return Err(ModelError::EmptyCurriculum(q.id.clone()));
            }
            if let Some(&bad) = q.courses.iter().find(|&&c| c >= courses.len()) {
                return Err(ModelError::CurriculumCourse {
                    curriculum: q.id.clone(),
                    course: bad,
                });
            }
        }
        for u in &unavailability {
            if u.course >= courses.len() || u.day >= days || u.period >= periods_per_day {
                return Err(ModelError::Unavailability {
                    course: u.course,
                    day: u.day,
                    period: u.period,
                });
            }
        }

        let n_courses = courses.len();
        let n_periods = days * periods_per_day;

        let mut course_curricula = vec![Vec::new(); n_courses];
        for (qi, q) in curricula.iter().enumerate() {
            for &c in &q.courses {
                if !course_curricula[c].contains(&qi) {
                    course_curricula[c].push(qi);
                }
            }
        }

        let mut conflict_matrix = vec![false; n_courses * n_courses];
        for c in 0..n_courses {
            conflict_matrix[c * n_courses + c] = true;
        }
        for q in &curricula {
            for &a in &q.courses {
                for &b in &q.courses {
                    conflict_matrix[a * n_courses + b] = true;
                }
            }
        }
        let mut by_teacher: HashMap<&str, Vec<CourseId>> = HashMap::new();
        for (c, course) in courses.iter().enumerate() {
            by_teacher
                .entry(course.teacher.as_str())
                .or_default()
                .push(c);
        }
        for group in by_teacher.values() {
            for &a in group {
                for &b in group {
                    conflict_matrix[a * n_courses + b] = true;
                }
            }
        }
        let conflicts = (0..n_courses)
            .map(|a| {
                (0..n_courses)
                    .filter(|&b| conflict_matrix[a * n_courses + b])
                    .collect()
            })
            .collect();

        let mut unavailable = vec![false; n_courses * n_periods];
        for u in &unavailability {
            unavailable[u.course * n_periods + u.day * periods_per_day + u.period] = true;
        }

        let mut instance = Self {
            name: name.into(),
            days,
            periods_per_day,
            courses,
            rooms,
            curricula,
            unavailability,
            events: Vec::new(),
            course_events: Vec::new(),
            course_curricula,
            conflicts,
            conflict_matrix,
            unavailable,
            room_classes: RoomClassification {
                classes: Vec::new(),
                lookup: Vec::new(),
                n_rooms: 0,
            },
        };
        instance.events = build_events(&instance);
        let mut start = 0;
        instance.course_events = instance
            .courses
            .iter()
            .map(|c| {
                let range = start..start + c.lectures;
                start += c.lectures;
                range
            })
            .collect();
        instance.room_classes = classify_rooms(&instance);
        Ok(instance)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn days(&self) -> usize {
        self.days
    }

    pub fn periods_per_day(&self) -> usize {
        self.periods_per_day
    }

    /// Total number of `(day, period)` pairs.
    pub fn periods(&self) -> usize {
        self.days * self.periods_per_day
    }

    pub fn courses(&self) -> &[Course] {
        &self.courses
    }

    pub fn rooms(&self) -> &[Room] {
        &self.rooms
    }

    pub fn curricula(&self) -> &[Curriculum] {
        &self.curricula
    }

    pub fn unavailability(&self) -> &[Unavailability] {
        &self.unavailability
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn event_count(&self) -> usize {
        self.events.len()
    }

    pub fn course_of(&self, event: EventId) -> CourseId {
        self.events[event].course
    }

    /// Event indices belonging to `course`, contiguous and in input order.
    pub fn course_events(&self, course: CourseId) -> Range<EventId> {
        self.course_events[course].clone()
    }

    /// Curriculum indices that contain `course`.
    pub fn course_curricula(&self, course: CourseId) -> &[usize] {
        &self.course_curricula[course]
    }

    /// Courses that may not be taught in the same period as `course`
    /// (shared curriculum or teacher), including `course` itself.
    pub fn conflicting_courses(&self, course: CourseId) -> &[CourseId] {
        &self.conflicts[course]
    }

    pub fn courses_conflict(&self, a: CourseId, b: CourseId) -> bool {
        self.conflict_matrix[a * self.courses.len() + b]
    }

    pub fn share_curriculum(&self, a: CourseId, b: CourseId) -> bool {
        self.course_curricula[a]
            .iter()
            .any(|q| self.course_curricula[b].contains(q))
    }

    pub fn is_unavailable(&self, course: CourseId, day: usize, period: usize) -> bool {
        self.unavailable[course * self.periods() + day * self.periods_per_day + period]
    }

    pub(crate) fn is_unavailable_at(&self, course: CourseId, period_index: usize) -> bool {
        self.unavailable[course * self.periods() + period_index]
    }

    pub fn room_classes(&self) -> &RoomClassification {
        &self.room_classes
    }

    pub fn course_index(&self, id: &str) -> Option<CourseId> {
        self.courses.iter().position(|c| c.id == id)
    }

    pub fn room_index(&self, id: &str) -> Option<RoomId> {
        self.rooms.iter().position(|r| r.id == id)
    }

    pub(crate) fn period_index(&self, day: usize, period: usize) -> usize {
        day * self.periods_per_day + period
    }

    pub(crate) fn split_period(&self, period_index: usize) -> (usize, usize) {
        (
            period_index / self.periods_per_day,
            period_index % self.periods_per_day,
        )
    }

    pub fn contains_slot(&self, slot: Timeslot) -> bool {
        slot.day < self.days && slot.period < self.periods_per_day && slot.room < self.rooms.len()
    }
}

fn check_unique<'a>(
    kind: &'static str,
    ids: impl Iterator<Item = &'a str>,
) -> Result<(), ModelError> {
    let mut seen = HashSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(ModelError::DuplicateId {
                kind,
                id: id.to_string(),
            });
        }
    }
    Ok(())
}

/// Expands every course into `lectures` events, grouped by course in input order.
pub fn build_events(instance: &Instance) -> Vec<Event> {
    instance
        .courses
        .iter()
        .enumerate()
        .flat_map(|(course, c)| std::iter::repeat_n(course, c.lectures))
        .enumerate()
        .map(|(index, course)| Event { index, course })
        .collect()
}

/// Splits the rooms of every course into best fit, fitting and too small.
///
/// A room fits when `capacity >= students`. Every fitting room with the
/// minimal spare capacity is a best fit, so ties all land in the first class.
pub fn classify_rooms(instance: &Instance) -> RoomClassification {
    let n_rooms = instance.rooms.len();
    let classes: Vec<[Vec<RoomId>; 3]> = instance
        .courses
        .iter()
        .map(|course| {
            let best_spare = instance
                .rooms
                .iter()
                .filter(|r| r.capacity >= course.students)
                .map(|r| r.capacity - course.students)
                .min();
            let mut classes: [Vec<RoomId>; 3] = Default::default();
            for (k, room) in instance.rooms.iter().enumerate() {
                let class = match best_spare {
                    _ if room.capacity < course.students => 2,
                    Some(spare) if room.capacity - course.students == spare => 0,
                    _ => 1,
                };
                classes[class].push(k);
            }
            classes
        })
        .collect();
    let mut lookup = vec![0u8; classes.len() * n_rooms];
    for (c, sets) in classes.iter().enumerate() {
        for (class, rooms) in sets.iter().enumerate() {
            for &r in rooms {
                lookup[c * n_rooms + r] = class as u8;
            }
        }
    }
    RoomClassification {
        classes,
        lookup,
        n_rooms,
    }
}

/// Hard constraint clauses a timetable must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Clause {
    /// Two events in the same room at the same time.
    RoomOccupancy,
    /// Two lectures of one course in the same period.
    SameCourse,
    /// Courses sharing a curriculum or teacher in the same period.
    Conflict,
    /// A lecture placed on a period its course is unavailable.
    Availability,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Clause::RoomOccupancy => "room-occupancy",
            Clause::SameCourse => "same-course-same-period",
            Clause::Conflict => "curriculum-or-teacher-conflict",
            Clause::Availability => "availability",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AssignError {
    #[error("event {0} is already assigned")]
    AlreadyAssigned(EventId),
    #[error("event {0} is not assigned")]
    NotAssigned(EventId),
    #[error("event index {0} out of range")]
    UnknownEvent(EventId),
    #[error("timeslot {0} is outside the grid")]
    OutOfGrid(Timeslot),
    #[error("placing event {event} at {slot} violates the {clause} constraint")]
    Violation {
        event: EventId,
        slot: Timeslot,
        clause: Clause,
    },
}

const FREE: u32 = u32::MAX;

/// A hard-feasible partial assignment of events to timeslots.
///
/// Alongside the assignment it keeps occupancy counters so that testing a
/// single cell for feasibility is O(1):
/// * `room_occ[t * rooms + r]`: the event in room `r` at period `t`;
/// * `blocked[c * periods + t]`: number of assigned events of courses
///   conflicting with `c` (itself included) at period `t`;
/// * `free_rooms[t]`: number of empty rooms at period `t`.
#[derive(Debug, Clone)]
pub struct Timetable {
    assignment: Vec<Option<Timeslot>>,
    unassigned: Vec<EventId>,
    unassigned_pos: Vec<usize>,
    room_occ: Vec<u32>,
    blocked: Vec<u16>,
    free_rooms: Vec<u16>,
    n_rooms: usize,
    n_periods: usize,
}

impl Timetable {
    /// Empty timetable: every event unassigned.
    pub fn new(instance: &Instance) -> Self {
        let n_events = instance.event_count();
        let n_rooms = instance.rooms().len();
        let n_periods = instance.periods();
        Self {
            assignment: vec![None; n_events],
            unassigned: (0..n_events).collect(),
            unassigned_pos: (0..n_events).collect(),
            room_occ: vec![FREE; n_periods * n_rooms],
            blocked: vec![0; instance.courses().len() * n_periods],
            free_rooms: vec![n_rooms as u16; n_periods],
            n_rooms,
            n_periods,
        }
    }

    pub fn slot_of(&self, event: EventId) -> Option<Timeslot> {
        self.assignment[event]
    }

    pub fn assignment(&self) -> &[Option<Timeslot>] {
        &self.assignment
    }

    /// Unassigned events, in no particular order.
    pub fn unassigned(&self) -> &[EventId] {
        &self.unassigned
    }

    pub fn unassigned_count(&self) -> usize {
        self.unassigned.len()
    }

    pub fn assigned_count(&self) -> usize {
        self.assignment.len() - self.unassigned.len()
    }

    pub fn is_complete(&self) -> bool {
        self.unassigned.is_empty()
    }

    /// Assigned events with their slots, in event order.
    pub fn placements(&self) -> impl Iterator<Item = (EventId, Timeslot)> + '_ {
        self.assignment
            .iter()
            .enumerate()
            .filter_map(|(e, s)| s.map(|s| (e, s)))
    }

    pub fn occupant(&self, instance: &Instance, slot: Timeslot) -> Option<EventId> {
        let t = instance.period_index(slot.day, slot.period);
        match self.room_occ[t * self.n_rooms + slot.room] {
            FREE => None,
            e => Some(e as EventId),
        }
    }

    /// Whether `course` may be taught at period index `t` given the events
    /// already placed (clauses b, c and d).
    #[inline]
    pub(crate) fn period_open(&self, instance: &Instance, course: CourseId, t: usize) -> bool {
        self.blocked[course * self.n_periods + t] == 0 && !instance.is_unavailable_at(course, t)
    }

    #[inline]
    pub(crate) fn room_free_at(&self, t: usize, room: RoomId) -> bool {
        self.room_occ[t * self.n_rooms + room] == FREE
    }

    #[inline]
    pub(crate) fn free_rooms_at(&self, t: usize) -> usize {
        self.free_rooms[t] as usize
    }

    /// First hard clause broken by placing `event` at `slot`, if any.
    pub fn violation(&self, instance: &Instance, event: EventId, slot: Timeslot) -> Option<Clause> {
        let course = instance.course_of(event);
        let t = instance.period_index(slot.day, slot.period);
        if !self.room_free_at(t, slot.room) {
            return Some(Clause::RoomOccupancy);
        }
        if instance.is_unavailable_at(course, t) {
            return Some(Clause::Availability);
        }
        if self.blocked[course * self.n_periods + t] > 0 {
            let same_course = instance.course_events(course).any(|e| {
                e != event
                    && self.assignment[e]
                        .is_some_and(|s| (s.day, s.period) == (slot.day, slot.period))
            });
            return Some(if same_course {
                Clause::SameCourse
            } else {
                Clause::Conflict
            });
        }
        None
    }

    pub fn can_assign(&self, instance: &Instance, event: EventId, slot: Timeslot) -> bool {
        let t = instance.period_index(slot.day, slot.period);
        self.room_free_at(t, slot.room) && self.period_open(instance, instance.course_of(event), t)
    }

    /// Places an unassigned event, refusing any hard violation.
    pub fn assign(
        &mut self,
        instance: &Instance,
        event: EventId,
        slot: Timeslot,
    ) -> Result<(), AssignError> {
        if event >= self.assignment.len() {
            return Err(AssignError::UnknownEvent(event));
        }
        if !instance.contains_slot(slot) {
            return Err(AssignError::OutOfGrid(slot));
        }
        if self.assignment[event].is_some() {
            return Err(AssignError::AlreadyAssigned(event));
        }
        if let Some(clause) = self.violation(instance, event, slot) {
            return Err(AssignError::Violation {
                event,
                slot,
                clause,
            });
        }
        self.place(instance, event, slot);
        Ok(())
    }

    /// Unassigns an event and returns the slot it occupied.
    pub fn unassign(
        &mut self,
        instance: &Instance,
        event: EventId,
    ) -> Result<Timeslot, AssignError> {
        if event >= self.assignment.len() {
            return Err(AssignError::UnknownEvent(event));
        }
        self.assignment[event]
            .ok_or(AssignError::NotAssigned(event))
            .map(|_| self.displace(instance, event))
    }

    pub(crate) fn place(&mut self, instance: &Instance, event: EventId, slot: Timeslot) {
        debug_assert!(self.assignment[event].is_none());
        debug_assert!(self.can_assign(instance, event, slot));
        let course = instance.course_of(event);
        let t = instance.period_index(slot.day, slot.period);
        self.assignment[event] = Some(slot);
        self.room_occ[t * self.n_rooms + slot.room] = event as u32;
        self.free_rooms[t] -= 1;
        for &c in instance.conflicting_courses(course) {
            self.blocked[c * self.n_periods + t] += 1;
        }
        let pos = self.unassigned_pos[event];
        let last = *self.unassigned.last().expect("event was unassigned");
        self.unassigned.swap_remove(pos);
        if last != event {
            self.unassigned_pos[last] = pos;
        }
    }

    pub(crate) fn displace(&mut self, instance: &Instance, event: EventId) -> Timeslot {
        let slot = self.assignment[event].take().expect("event was assigned");
        let course = instance.course_of(event);
        let t = instance.period_index(slot.day, slot.period);
        self.room_occ[t * self.n_rooms + slot.room] = FREE;
        self.free_rooms[t] += 1;
        for &c in instance.conflicting_courses(course) {
            self.blocked[c * self.n_periods + t] -= 1;
        }
        self.unassigned_pos[event] = self.unassigned.len();
        self.unassigned.push(event);
        slot
    }

    /// Number of cells `course` could currently be placed in.
    pub fn available_count(&self, instance: &Instance, course: CourseId) -> usize {
        (0..self.n_periods)
            .filter(|&t| self.period_open(instance, course, t))
            .map(|t| self.free_rooms_at(t))
            .sum()
    }
}

/// Equality of the assignment and every derived counter; the internal order
/// of the unassigned list is not significant.
impl PartialEq for Timetable {
    fn eq(&self, other: &Self) -> bool {
        let mut a = self.unassigned.clone();
        let mut b = other.unassigned.clone();
        a.sort_unstable();
        b.sort_unstable();
        self.assignment == other.assignment
            && a == b
            && self.room_occ == other.room_occ
            && self.blocked == other.blocked
            && self.free_rooms == other.free_rooms
    }
}

impl Eq for Timetable {}

/// Every cell where `event` could be placed without breaking a hard clause.
///
/// Rooms too small for the course are included: undersized rooms cost soft
/// penalty only.
pub fn available_timeslots(
    instance: &Instance,
    timetable: &Timetable,
    event: EventId,
) -> Vec<Timeslot> {
    let course = instance.course_of(event);
    let mut slots = Vec::new();
    for t in 0..instance.periods() {
        if !timetable.period_open(instance, course, t) {
            continue;
        }
        let (day, period) = instance.split_period(t);
        for room in 0..instance.rooms().len() {
            if timetable.room_free_at(t, room) {
                slots.push(Timeslot { day, period, room });
            }
        }
    }
    slots
}

#[cfg(test)]
mod tests {
    use super::*;

    fn course(id: &str, teacher: &str, lectures: usize, mwd: usize, students: usize) -> Course {
        Course {
            id: id.into(),
            teacher: teacher.into(),
            lectures,
            min_working_days: mwd,
            students,
        }
    }

    fn room(id: &str, capacity: usize) -> Room {
        Room {
            id: id.into(),
            capacity,
        }
    }

    fn toy1(unavailable: bool) -> Instance {
        Instance::new(
            "TOY1",
            2,
            2,
            vec![course("c1", "t1", 2, 2, 10), course("c2", "t2", 1, 1, 15)],
            vec![room("rA", 10), room("rB", 20)],
            vec![Curriculum {
                id: "q1".into(),
                courses: vec![0, 1],
            }],
            if unavailable {
                vec![Unavailability {
                    course: 1,
                    day: 0,
                    period: 0,
                }]
            } else {
                Vec::new()
            },
        )
        .unwrap()
    }

    fn single_course(students: usize, capacities: &[usize]) -> Instance {
        let rooms = capacities
            .iter()
            .enumerate()
            .map(|(i, &c)| room(&format!("r{i}"), c))
            .collect();
        Instance::new(
            "rooms",
            1,
            1,
            vec![course("c", "t", 1, 1, students)],
            rooms,
            Vec::new(),
            Vec::new(),
        )
        .unwrap()
    }

    #[test]
    fn events_follow_course_order() {
        let inst = Instance::new(
            "x",
            1,
            3,
            vec![course("a", "t", 2, 1, 0), course("b", "u", 1, 1, 0)],
            vec![room("r", 1)],
            Vec::new(),
            Vec::new(),
        )
        .unwrap();
        let courses: Vec<_> = build_events(&inst).iter().map(|e| e.course).collect();
        assert_eq!(courses, vec![0, 0, 1]);
        assert_eq!(inst.course_events(0), 0..2);
        assert_eq!(inst.course_events(1), 2..3);

        let three = Instance::new(
            "y",
            1,
            3,
            vec![course("a", "t", 3, 1, 0)],
            vec![room("r", 1)],
            Vec::new(),
            Vec::new(),
        )
        .unwrap();
        assert_eq!(build_events(&three).len(), 3);
    }

    #[test]
    fn toy1_events() {
        let inst = toy1(true);
        let events = inst.events();
        assert_eq!(events.len(), 3);
        assert_eq!(
            (events[0].course, events[1].course, events[2].course),
            (0, 0, 1)
        );
    }

    #[test]
    fn exact_fit_is_best() {
        let inst = single_course(10, &[10, 20]);
        let rc = inst.room_classes();
        assert_eq!(rc.rooms(0, RoomClass::BestFit), &[0]);
        assert_eq!(rc.rooms(0, RoomClass::Fits), &[1]);
        assert!(rc.rooms(0, RoomClass::TooSmall).is_empty());
    }

    #[test]
    fn oversized_course_only_fits_large_room() {
        let inst = single_course(15, &[10, 20]);
        let rc = inst.room_classes();
        assert_eq!(rc.rooms(0, RoomClass::BestFit), &[1]);
        assert!(rc.rooms(0, RoomClass::Fits).is_empty());
        assert_eq!(rc.rooms(0, RoomClass::TooSmall), &[0]);
        assert_eq!(rc.class_of(0, 0), RoomClass::TooSmall);
    }

    #[test]
    fn tied_best_fit_rooms_share_class() {
        let inst = single_course(0, &[10, 10]);
        let rc = inst.room_classes();
        assert_eq!(rc.rooms(0, RoomClass::BestFit), &[0, 1]);
        assert!(rc.rooms(0, RoomClass::Fits).is_empty());
    }

    #[test]
    fn nothing_fits() {
        let inst = single_course(50, &[10, 20]);
        let rc = inst.room_classes();
        assert!(rc.rooms(0, RoomClass::BestFit).is_empty());
        assert!(rc.rooms(0, RoomClass::Fits).is_empty());
        assert_eq!(rc.rooms(0, RoomClass::TooSmall), &[0, 1]);
    }

    #[test]
    fn empty_timetable_offers_whole_grid() {
        let inst = toy1(false);
        let tt = Timetable::new(&inst);
        assert_eq!(available_timeslots(&inst, &tt, 0).len(), 8);
        assert_eq!(tt.available_count(&inst, 0), 8);
    }

    #[test]
    fn unavailability_removes_both_rooms() {
        let inst = toy1(true);
        let tt = Timetable::new(&inst);
        let slots = available_timeslots(&inst, &tt, 2);
        assert_eq!(slots.len(), 6);
        assert!(slots.iter().all(|s| (s.day, s.period) != (0, 0)));
    }

    #[test]
    fn curriculum_conflict_and_room_busy() {
        let inst = toy1(true);
        let mut tt = Timetable::new(&inst);
        tt.assign(&inst, 0, Timeslot::new(0, 0, 0)).unwrap();
        let slots = available_timeslots(&inst, &tt, 2);
        assert_eq!(slots.len(), 6);
        assert_eq!(
            tt.violation(&inst, 2, Timeslot::new(0, 0, 0)),
            Some(Clause::RoomOccupancy)
        );
        assert_eq!(
            tt.violation(&inst, 2, Timeslot::new(0, 0, 1)),
            Some(Clause::Availability)
        );
        assert_eq!(
            tt.violation(&inst, 1, Timeslot::new(0, 0, 1)),
            Some(Clause::SameCourse)
        );
    }

    #[test]
    fn teacher_conflict_blocks_period() {
        let inst = Instance::new(
            "teach",
            1,
            2,
            vec![course("a", "t", 1, 1, 0), course("b", "t", 1, 1, 0)],
            vec![room("r1", 5), room("r2", 5)],
            Vec::new(),
            Vec::new(),
        )
        .unwrap();
        let mut tt = Timetable::new(&inst);
        tt.assign(&inst, 0, Timeslot::new(0, 0, 0)).unwrap();
        let err = tt.assign(&inst, 1, Timeslot::new(0, 0, 1)).unwrap_err();
        assert!(matches!(
            err,
            AssignError::Violation {
                clause: Clause::Conflict,
                ..
            }
        ));
        assert!(tt.assign(&inst, 1, Timeslot::new(0, 1, 1)).is_ok());
    }

    #[test]
    fn assign_unassign_restores_state() {
        let inst = toy1(true);
        let empty = Timetable::new(&inst);
        let mut tt = empty.clone();
        tt.assign(&inst, 1, Timeslot::new(1, 1, 1)).unwrap();
        assert_eq!(tt.unassigned_count(), 2);
        assert_eq!(tt.unassign(&inst, 1).unwrap(), Timeslot::new(1, 1, 1));
        assert_eq!(tt, empty);
        assert_eq!(tt.unassign(&inst, 1), Err(AssignError::NotAssigned(1)));
    }

    #[test]
    fn rejects_bad_instances() {
        let err = Instance::new(
            "bad",
            2,
            2,
            vec![course("a", "t", 1, 3, 0)],
            vec![room("r", 1)],
            Vec::new(),
            Vec::new(),
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::MinWorkingDays { .. }));
        let err = Instance::new(
            "bad",
            2,
            2,
            vec![course("a", "t", 1, 1, 0), course("a", "u", 1, 1, 0)],
            vec![room("r", 1)],
            Vec::new(),
            Vec::new(),
        )
        .unwrap_err();
        assert!(matches!(
            err,
            ModelError::DuplicateId { kind: "course", .. }
        ));
    }
}
