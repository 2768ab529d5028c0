//! Reading and writing the competition text formats.
//!
//! Instances use the `.ctt` layout (a header block followed by `COURSES:`,
//! `ROOMS:`, `CURRICULA:` and `UNAVAILABILITY_CONSTRAINTS:` sections and a
//! closing `END.`). Solutions are one `<course> <room> <day> <period>` line
//! per placed lecture.

use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{
    AssignError, Clause, Course, Curriculum, EventId, Instance, ModelError, Room, Timeslot,
    Timetable, Unavailability,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: unknown {kind} id `{id}`")]
    UnknownId {
        line: usize,
        kind: &'static str,
        id: String,
    },
    #[error("line {line}: header declares {declared} {section} but {found} were listed")]
    CountMismatch {
        line: usize,
        section: &'static str,
        declared: usize,
        found: usize,
    },
    #[error("line {line}: missing `END.` terminator")]
    MissingEnd { line: usize },
    #[error("invalid instance: {0}")]
    Model(#[from] ModelError),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolutionError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: unknown {kind} id `{id}`")]
    UnknownId {
        line: usize,
        kind: &'static str,
        id: String,
    },
    #[error(
        "line {line}: day {day} / period {period} is outside the {days}x{periods_per_day} grid"
    )]
    OutOfRange {
        line: usize,
        day: usize,
        period: usize,
        days: usize,
        periods_per_day: usize,
    },
    #[error("line {line}: course `{course}` has only {lectures} lectures")]
    TooManyLectures {
        line: usize,
        course: String,
        lectures: usize,
    },
    #[error("line {line}: {clause} violation: `{text}`")]
    HardViolation {
        line: usize,
        clause: Clause,
        text: String,
    },
}

impl SolutionError {
    pub fn line(&self) -> usize {
        match self {
            SolutionError::Malformed { line, .. }
            | SolutionError::UnknownId { line, .. }
            | SolutionError::OutOfRange { line, .. }
            | SolutionError::TooManyLectures { line, .. }
            | SolutionError::HardViolation { line, .. } => *line,
        }
    }
}

/// Non-empty lines with their 1-based numbers; `\r\n` tolerated.
fn numbered_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

struct Lines<'a> {
    inner: std::iter::Peekable<Box<dyn Iterator<Item = (usize, &'a str)> + 'a>>,
    last_line: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let last_line = text.lines().count().max(1);
        let it: Box<dyn Iterator<Item = (usize, &'a str)> + 'a> = Box::new(numbered_lines(text));
        Self {
            inner: it.peekable(),
            last_line,
        }
    }

    fn next_line(&mut self) -> Option<(usize, &'a str)> {
        self.inner.next()
    }

    fn peek(&mut self) -> Option<&(usize, &'a str)> {
        self.inner.peek()
    }

    fn expect_line(&mut self, what: &str) -> Result<(usize, &'a str), ParseError> {
        self.next_line().ok_or_else(|| ParseError::Malformed {
            line: self.last_line,
            message: format!("unexpected end of input, expected {what}"),
        })
    }

    fn header(&mut self, key: &str) -> Result<(usize, &'a str), ParseError> {
        let (line, text) = self.expect_line(&format!("`{key}:` header"))?;
        let value = text
            .strip_prefix(key)
            .and_then(|rest| rest.trim_start().strip_prefix(':'))
            .map(str::trim)
            .ok_or_else(|| ParseError::Malformed {
                line,
                message: format!("expected `{key}:` header, found `{text}`"),
            })?;
        if value.is_empty() {
            return Err(ParseError::Malformed {
                line,
                message: format!("`{key}:` header has no value"),
            });
        }
        Ok((line, value))
    }

    fn count_header(&mut self, key: &str) -> Result<usize, ParseError> {
        let (line, value) = self.header(key)?;
        parse_count(line, value, key)
    }

    fn section(&mut self, marker: &str) -> Result<usize, ParseError> {
        let (line, text) = self.expect_line(&format!("`{marker}` section"))?;
        if text != marker {
            return Err(ParseError::Malformed {
                line,
                message: format!("expected `{marker}`, found `{text}`"),
            });
        }
        Ok(line)
    }

    /// Lines up to (not including) the next section marker or `END.`.
    fn body(&mut self) -> Vec<(usize, &'a str)> {
        let mut out = Vec::new();
        while let Some(&(_, text)) = self.peek() {
            if is_marker(text) {
                break;
            }
            out.extend(self.next_line());
        }
        out
    }
}

fn is_marker(text: &str) -> bool {
    matches!(
        text,
        "COURSES:" | "ROOMS:" | "CURRICULA:" | "UNAVAILABILITY_CONSTRAINTS:" | "END."
    )
}

fn parse_count(line: usize, token: &str, what: &str) -> Result<usize, ParseError> {
    token.parse().map_err(|_| ParseError::Malformed {
        line,
        message: format!("`{token}` is not a valid count for {what}"),
    })
}

fn fields<'a>(
    line: usize,
    text: &'a str,
    expected: usize,
    what: &str,
) -> Result<Vec<&'a str>, ParseError> {
    let parts: Vec<&str> = text.split_whitespace().collect();
    if parts.len() != expected {
        return Err(ParseError::Malformed {
            line,
            message: format!("{what} line needs {expected} fields, found {}", parts.len()),
        });
    }
    Ok(parts)
}

fn check_count(
    line: usize,
    section: &'static str,
    declared: usize,
    found: usize,
) -> Result<(), ParseError> {
    if declared != found {
        return Err(ParseError::CountMismatch {
            line,
            section,
            declared,
            found,
        });
    }
    Ok(())
}

/// Parses a `.ctt` instance.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut lines = Lines::new(text);
    let (_, name) = lines.header("Name")?;
    let n_courses = lines.count_header("Courses")?;
    let n_rooms = lines.count_header("Rooms")?;
    let days = lines.count_header("Days")?;
    let periods_per_day = lines.count_header("Periods_per_day")?;
    let n_curricula = lines.count_header("Curricula")?;
    let n_constraints = lines.count_header("Constraints")?;

    let marker = lines.section("COURSES:")?;
    let mut courses = Vec::with_capacity(n_courses);
    for (line, text) in lines.body() {
        let f = fields(line, text, 5, "course")?;
        courses.push(Course {
            id: f[0].to_string(),
            teacher: f[1].to_string(),
            lectures: parse_count(line, f[2], "lectures")?,
            min_working_days: parse_count(line, f[3], "minimum working days")?,
            students: parse_count(line, f[4], "students")?,
        });
    }
    check_count(marker, "courses", n_courses, courses.len())?;

    let marker = lines.section("ROOMS:")?;
    let mut rooms = Vec::with_capacity(n_rooms);
    for (line, text) in lines.body() {
        let f = fields(line, text, 2, "room")?;
        rooms.push(Room {
            id: f[0].to_string(),
            capacity: parse_count(line, f[1], "capacity")?,
        });
    }
    check_count(marker, "rooms", n_rooms, rooms.len())?;

    let course_index = |line: usize, id: &str| {
        courses
            .iter()
            .position(|c| c.id == id)
            .ok_or_else(|| ParseError::UnknownId {
                line,
                kind: "course",
                id: id.to_string(),
            })
    };

    let marker = lines.section("CURRICULA:")?;
    let mut curricula = Vec::with_capacity(n_curricula);
    for (line, text) in lines.body() {
        let parts: Vec<&str> = text.split_whitespace().collect();
        if parts.len() < 2 {
            return Err(ParseError::Malformed {
                line,
                message: "curriculum line needs an id and a course count".into(),
            });
        }
        let members = parse_count(line, parts[1], "curriculum size")?;
        if parts.len() != members + 2 {
            return Err(ParseError::CountMismatch {
                line,
                section: "curriculum members",
                declared: members,
                found: parts.len() - 2,
            });
        }
        let courses_in = parts[2..]
            .iter()
            .map(|id| course_index(line, id))
            .collect::<Result<Vec<_>, _>>()?;
        curricula.push(Curriculum {
            id: parts[0].to_string(),
            courses: courses_in,
        });
    }
    check_count(marker, "curricula", n_curricula, curricula.len())?;

    let marker = lines.section("UNAVAILABILITY_CONSTRAINTS:")?;
    let mut unavailability = Vec::with_capacity(n_constraints);
    for (line, text) in lines.body() {
        let f = fields(line, text, 3, "unavailability")?;
        let course = course_index(line, f[0])?;
        let day = parse_count(line, f[1], "day")?;
        let period = parse_count(line, f[2], "period")?;
        if day >= days || period >= periods_per_day {
            return Err(ParseError::Malformed {
                line,
                message: format!(
                    "unavailability ({day}, {period}) outside the {days}x{periods_per_day} grid"
                ),
            });
        }
        unavailability.push(Unavailability {
            course,
            day,
            period,
        });
    }
    check_count(marker, "constraints", n_constraints, unavailability.len())?;

    match lines.next_line() {
        Some((_, "END.")) => {}
        Some((line, text)) => {
            return Err(ParseError::Malformed {
                line,
                message: format!("expected `END.`, found `{text}`"),
            })
        }
        None => {
            return Err(ParseError::MissingEnd {
                line: lines.last_line,
            })
        }
    }
    if let Some((line, _)) = lines.next_line() {
        log::warn!("ignoring content after `END.` starting at line {line}");
    }

    Ok(Instance::new(
        name,
        days,
        periods_per_day,
        courses,
        rooms,
        curricula,
        unavailability,
    )?)
}

/// Renders an instance in `.ctt` layout; `parse_instance` reads it back.
pub fn write_instance(instance: &Instance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Name: {}", instance.name());
    let _ = writeln!(out, "Courses: {}", instance.courses().len());
    let _ = writeln!(out, "Rooms: {}", instance.rooms().len());
    let _ = writeln!(out, "Days: {}", instance.days());
    let _ = writeln!(out, "Periods_per_day: {}", instance.periods_per_day());
    let _ = writeln!(out, "Curricula: {}", instance.curricula().len());
    let _ = writeln!(out, "Constraints: {}", instance.unavailability().len());
    out.push_str("\nCOURSES:\n");
    for c in instance.courses() {
        let _ = writeln!(
            out,
            "{} {} {} {} {}",
            c.id, c.teacher, c.lectures, c.min_working_days, c.students
        );
    }
    out.push_str("\nROOMS:\n");
    for r in instance.rooms() {
        let _ = writeln!(out, "{} {}", r.id, r.capacity);
    }
    out.push_str("\nCURRICULA:\n");
    for q in instance.curricula() {
        let _ = write!(out, "{} {}", q.id, q.courses.len());
        for &c in &q.courses {
            let _ = write!(out, " {}", instance.courses()[c].id);
        }
        out.push('\n');
    }
    out.push_str("\nUNAVAILABILITY_CONSTRAINTS:\n");
    for u in instance.unavailability() {
        let _ = writeln!(
            out,
            "{} {} {}",
            instance.courses()[u.course].id,
            u.day,
            u.period
        );
    }
    out.push_str("\nEND.\n");
    out
}

/// Renders assigned events as solution lines, in event order.
pub fn write_solution(instance: &Instance, timetable: &Timetable) -> String {
    let mut out = String::new();
    for (event, slot) in timetable.placements() {
        let course = &instance.courses()[instance.course_of(event)];
        let room = &instance.rooms()[slot.room];
        let _ = writeln!(
            out,
            "{} {} {} {}",
            course.id, room.id, slot.day, slot.period
        );
    }
    out
}

/// One solution line resolved against an instance, before any hard check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Placement {
    pub line: usize,
    pub event: EventId,
    pub slot: Timeslot,
}

/// Resolves solution lines to events and slots without checking hard
/// constraints. Lines of a course are matched to its events in order.
pub fn parse_placements(instance: &Instance, text: &str) -> Result<Vec<Placement>, SolutionError> {
    let mut used = vec![0usize; instance.courses().len()];
    let mut out = Vec::new();
    for (line, text) in numbered_lines(text) {
        let parts: Vec<&str> = text.split_whitespace().collect();
        if parts.len() != 4 {
            return Err(SolutionError::Malformed {
                line,
                message: format!("expected `<course> <room> <day> <period>`, found `{text}`"),
            });
        }
        let course = instance
            .course_index(parts[0])
            .ok_or_else(|| SolutionError::UnknownId {
                line,
                kind: "course",
                id: parts[0].to_string(),
            })?;
        let room = instance
            .room_index(parts[1])
            .ok_or_else(|| SolutionError::UnknownId {
                line,
                kind: "room",
                id: parts[1].to_string(),
            })?;
        let number = |s: &str| {
            s.parse::<usize>().map_err(|_| SolutionError::Malformed {
                line,
                message: format!("`{s}` is not a valid day or period"),
            })
        };
        let day = number(parts[2])?;
        let period = number(parts[3])?;
        if day >= instance.days() || period >= instance.periods_per_day() {
            return Err(SolutionError::OutOfRange {
                line,
                day,
                period,
                days: instance.days(),
                periods_per_day: instance.periods_per_day(),
            });
        }
        let events = instance.course_events(course);
        if used[course] == events.len() {
            return Err(SolutionError::TooManyLectures {
                line,
                course: parts[0].to_string(),
                lectures: events.len(),
            });
        }
        out.push(Placement {
            line,
            event: events.start + used[course],
            slot: Timeslot { day, period, room },
        });
        used[course] += 1;
    }
    Ok(out)
}

/// Parses a solution into a timetable, rejecting any hard violation.
pub fn parse_solution(instance: &Instance, text: &str) -> Result<Timetable, SolutionError> {
    let placements = parse_placements(instance, text)?;
    let raw: Vec<&str> = text.lines().collect();
    let mut timetable = Timetable::new(instance);
    for p in placements {
        match timetable.assign(instance, p.event, p.slot) {
            Ok(()) => {}
            Err(AssignError::Violation { clause, .. }) => {
                return Err(SolutionError::HardViolation {
                    line: p.line,
                    clause,
                    text: raw[p.line - 1].trim().to_string(),
                })
            }
            Err(e) => unreachable!("placement already resolved: {e}"),
        }
    }
    Ok(timetable)
}
