//! A small trail-based constraint programming kernel built around
//! insertion-based sequence variables.
//!
//! The crate is organised bottom-up:
//!
//! * [`state`]: trail, reversible integers and reversible sparse sets;
//! * [`seqvar`]: the O(n²) sequence domain with its queries and updates;
//! * [`engine`]: integer variables, Boolean visit views, the propagation
//!   fix-point and a depth-first branch-and-bound search;
//! * [`constraints`]: Distance, TransitionTimes, Precedence and Cumulative
//!   plus a few arithmetic helpers;
//! * [`search`]: insertion branchings and the large neighbourhood search
//!   driver;
//! * [`batch`]: data-parallel helpers for independent runs.

pub mod batch;
pub mod constraints;
pub mod engine;
pub mod search;
pub mod seqvar;
pub mod state;

pub use engine::{
    BoolVisitView, CpResult, Decision, Inconsistency, IntVar, Limits, Propagator, SearchStats,
    SeqVar, Solver, Store, VarEvent,
};
pub use seqvar::{Node, SequenceDomain};
pub use state::{Level, RevInt, RevSparseSet, Status, Trail, TriPartition};
