//! Hybrid adaptive operator selection.
//!
//! A [`hybrid::HybridController`] chooses, at every operator application,
//! between a stateless bandit ([`stateless`]) and a Double-DQN policy over
//! search-state features ([`statebased`]). Both modules learn from every
//! outcome. Two hosts are provided: differential evolution for real-valued
//! functions ([`de`], [`benchmarks`]) and local search for CVRPTW
//! ([`cvrptw`]). [`harness`] runs training and comparison experiments.

pub mod benchmarks;
pub mod cvrptw;
pub mod de;
pub mod error;
pub mod harness;
pub mod hybrid;
pub mod rng;
pub mod statebased;
pub mod stateless;
pub mod types;

pub use error::{Error, Result};
pub use hybrid::{
    AosMode, DecisionPolicy, HybridController, PolicyMode, RunResult, SearchHost, StepOutcome,
};
pub use rng::RngStream;
pub use types::{
    improvement, Domain, IterationLog, ModuleKind, Objective, OperatorId, StateVector, Transition,
};
