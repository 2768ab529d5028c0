//! Greedy construction of an initial timetable.
//!
//! [`myopic_construct`] assigns events one at a time, always taking the open
//! event with the fewest available cells. [`reactive_construct`] repeats that
//! pass from scratch; events that failed in one pass are handled first in the
//! next one.
//!
//! Cells are picked by [`select_timeslot`]: with probability
//! `order_flip_probability` the room classes are tried best fit, fitting, too
//! small; otherwise fitting, best fit, too small. Within the first non-empty
//! class a cell is drawn uniformly.

use rand::Rng;

use crate::model::{EventId, Instance, Timeslot, Timetable};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstructionConfig {
    pub max_loops: usize,
    /// Probability of trying best-fit rooms before merely fitting ones.
    pub order_flip_probability: f64,
}

impl Default for ConstructionConfig {
    fn default() -> Self {
        Self {
            max_loops: 50,
            order_flip_probability: 0.5,
        }
    }
}

/// Order in which room classes are tried.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoomOrder {
    /// best fit, fitting, too small
    BestFirst,
    /// fitting, best fit, too small
    FitFirst,
}

impl RoomOrder {
    fn classes(self) -> [usize; 3] {
        match self {
            RoomOrder::BestFirst => [0, 1, 2],
            RoomOrder::FitFirst => [1, 0, 2],
        }
    }

    pub fn draw<R: Rng + ?Sized>(best_first_probability: f64, rng: &mut R) -> Self {
        if rng.random_bool(best_first_probability) {
            RoomOrder::BestFirst
        } else {
            RoomOrder::FitFirst
        }
    }
}

/// Reusable buffers for timeslot selection.
#[derive(Debug, Default, Clone)]
pub struct SlotSelector {
    buckets: [Vec<Timeslot>; 3],
}

impl SlotSelector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn select<R: Rng + ?Sized>(
        &mut self,
        instance: &Instance,
        timetable: &Timetable,
        event: EventId,
        best_first_probability: f64,
        rng: &mut R,
    ) -> Option<Timeslot> {
        let order = RoomOrder::draw(best_first_probability, rng);
        self.select_with_order(instance, timetable, event, order, rng)
    }

    pub fn select_with_order<R: Rng + ?Sized>(
        &mut self,
        instance: &Instance,
        timetable: &Timetable,
        event: EventId,
        order: RoomOrder,
        rng: &mut R,
    ) -> Option<Timeslot> {
        let course = instance.course_of(event);
        let classes = instance.room_classes();
        let n_rooms = instance.rooms().len();
        for bucket in &mut self.buckets {
            bucket.clear();
        }
        for t in 0..instance.periods() {
            if timetable.free_rooms_at(t) == 0 || !timetable.period_open(instance, course, t) {
                continue;
            }
            let (day, period) = instance.split_period(t);
            for room in 0..n_rooms {
                if timetable.room_free_at(t, room) {
                    self.buckets[classes.class_index(course, room)].push(Timeslot {
                        day,
                        period,
                        room,
                    });
                }
            }
        }
        order
            .classes()
            .into_iter()
            .map(|c| &self.buckets[c])
            .find(|b| !b.is_empty())
            .map(|b| b[rng.random_range(0..b.len())])
    }
}

/// Picks a cell for an unassigned event, or `None` when nothing is available.
pub fn select_timeslot<R: Rng + ?Sized>(
    instance: &Instance,
    timetable: &Timetable,
    event: EventId,
    best_first_probability: f64,
    rng: &mut R,
) -> Option<Timeslot> {
    SlotSelector::new().select(instance, timetable, event, best_first_probability, rng)
}

/// Index into `pool` of the event with the fewest available cells; ties are
/// broken uniformly at random.
fn most_critical<R: Rng + ?Sized>(
    instance: &Instance,
    timetable: &Timetable,
    pool: &[EventId],
    cache: &mut [Option<usize>],
    rng: &mut R,
) -> usize {
    for &e in pool {
        cache[instance.course_of(e)] = None;
    }
    let mut best = usize::MAX;
    let mut chosen = 0;
    let mut ties = 0u32;
    for (i, &e) in pool.iter().enumerate() {
        let course = instance.course_of(e);
        let count =
            *cache[course].get_or_insert_with(|| timetable.available_count(instance, course));
        if count < best {
            best = count;
            chosen = i;
            ties = 1;
        } else if count == best {
            ties += 1;
            if rng.random_range(0..ties) == 0 {
                chosen = i;
            }
        }
    }
    chosen
}

/// Sets of one construction pass.
#[derive(Debug, Clone, Default)]
pub struct EventPool {
    pub prioritized: Vec<EventId>,
    pub non_prioritized: Vec<EventId>,
    pub unassigned: Vec<EventId>,
}

impl EventPool {
    /// Prioritizes `failed`; every other event is non-prioritized.
    pub fn new(instance: &Instance, failed: Vec<EventId>) -> Self {
        let mut flag = vec![false; instance.event_count()];
        for &e in &failed {
            flag[e] = true;
        }
        Self {
            non_prioritized: (0..instance.event_count()).filter(|&e| !flag[e]).collect(),
            prioritized: failed,
            unassigned: Vec::new(),
        }
    }
}

struct Builder<'a> {
    instance: &'a Instance,
    timetable: Timetable,
    selector: SlotSelector,
    cache: Vec<Option<usize>>,
    probability: f64,
}

impl<'a> Builder<'a> {
    fn new(instance: &'a Instance, config: &ConstructionConfig) -> Self {
        Self {
            instance,
            timetable: Timetable::new(instance),
            selector: SlotSelector::new(),
            cache: vec![None; instance.courses().len()],
            probability: config.order_flip_probability,
        }
    }

    /// Drains `open` most-critical-first, pushing failures to `unassigned`.
    fn drain<R: Rng + ?Sized>(
        &mut self,
        open: &mut Vec<EventId>,
        unassigned: &mut Vec<EventId>,
        rng: &mut R,
    ) {
        while !open.is_empty() {
            let i = most_critical(self.instance, &self.timetable, open, &mut self.cache, rng);
            let event = open.swap_remove(i);
            match self
                .selector
                .select(self.instance, &self.timetable, event, self.probability, rng)
            {
                Some(slot) => self.timetable.place(self.instance, event, slot),
                None => unassigned.push(event),
            }
        }
    }
}

/// One greedy pass over all events.
pub fn myopic_construct<R: Rng + ?Sized>(
    instance: &Instance,
    config: &ConstructionConfig,
    rng: &mut R,
) -> Timetable {
    let mut builder = Builder::new(instance, config);
    let mut open: Vec<EventId> = (0..instance.event_count()).collect();
    let mut failed = Vec::new();
    builder.drain(&mut open, &mut failed, rng);
    builder.timetable
}

#[derive(Debug, Clone)]
pub struct ReactiveOutcome {
    pub timetable: Timetable,
    /// Passes performed, at most `max_loops`.
    pub loops: usize,
}

impl ReactiveOutcome {
    pub fn is_feasible(&self) -> bool {
        self.timetable.is_complete()
    }
}

/// Repeated construction that prioritises the previous pass's failures.
///
/// Stops at the first pass that places every event or after `max_loops`
/// passes (at least one pass is always made).
pub fn reactive_construct<R: Rng + ?Sized>(
    instance: &Instance,
    config: &ConstructionConfig,
    rng: &mut R,
) -> ReactiveOutcome {
    let mut failed = Vec::new();
    let mut loops = 0;
    loop {
        let mut pool = EventPool::new(instance, std::mem::take(&mut failed));
        let mut builder = Builder::new(instance, config);
        builder.drain(&mut pool.prioritized, &mut pool.unassigned, rng);
        builder.drain(&mut pool.non_prioritized, &mut pool.unassigned, rng);
        loops += 1;
        if pool.unassigned.is_empty() || loops >= config.max_loops {
            return ReactiveOutcome {
                timetable: builder.timetable,
                loops,
            };
        }
        failed = pool.unassigned;
    }
}
