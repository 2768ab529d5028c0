//! Curriculum-based course timetabling.
//!
//! The pipeline is: parse a `.ctt` instance ([`io`]), build a hard-feasible
//! starting timetable with greedy or reactive construction
//! ([`construction`]), then improve it with ruin-and-recreate Threshold
//! Accepting or Iterated Local Search ([`search`]) under the lexicographic
//! `(unassigned events, soft penalty)` objective ([`evaluation`]).

pub mod cli;
pub mod construction;
pub mod evaluation;
pub mod generate;
pub mod harness;
pub mod io;
pub mod model;
pub mod rng;
pub mod search;

pub use construction::{myopic_construct, reactive_construct, ConstructionConfig, ReactiveOutcome};
pub use evaluation::{
    compare_lex, evaluate_full, validate_hard, Evaluation, IncrementalState, SoftBreakdown,
};
pub use io::{parse_instance, parse_solution, write_instance, write_solution};
pub use model::{Instance, Timeslot, Timetable};
pub use search::{ils_search, ta_search, Budget, SearchConfig, SearchResult, Threshold};
