//! Dial-a-ride problem on top of the `seqcp` kernel: Cordeau-format
//! instances, the sequence-variable model, LNS solving, an independent
//! validator and gap reporting.
//!
//! Distances and times are fixed-point integers, ×100 rounded half up, so
//! objectives divide by 100 to compare with published values.

pub mod gap;
pub mod generator;
pub mod instance;
pub mod model;
pub mod solution;
pub mod solve;
pub mod validate;

pub use instance::{parse, Instance, Layout, NodeKind};
pub use model::{Model, Variant};
pub use solution::Solution;
pub use solve::{solve, Outcome, SolveConfig};
pub use validate::{validate, Violation};
