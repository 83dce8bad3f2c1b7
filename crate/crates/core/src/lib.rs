//! Graph collision laboratory.
//!
//! Tools for the graph collision decision problem: given a known graph and a
//! hidden vertex marking, decide whether some edge has both endpoints marked.
//! The crate provides the exact combinatorics (independence, the maximum
//! degree sum over independent sets), a Gram-matrix model of the span program
//! that decides the promise version, a phase-estimation counting model with
//! boosted repetition, the three-step decision pipeline built from those
//! parts, and a random-graph study of the quantities that drive its cost.

pub mod counting;
pub mod graph;
pub mod linalg;
pub mod pipeline;
pub mod rng;
pub mod span;
pub mod study;
