//! Simulation library for online learning under switching constraints.
//!
//! The crate is organised around the pieces of a repeated game between a
//! learner and an adversary:
//!
//! * [`game`] holds the shared domain types (actions, loss matrices, traces)
//!   and the scoring functions (regret, switches, switching-cost objective).
//! * [`seed`] derives independent, reproducible random streams.
//! * [`experts`], [`batching`], [`bandit`] and [`combinatorial`] implement the
//!   learners: full-information experts algorithms, the batched-restart
//!   framework and budget compositions, bandit learners and combinatorial FPL.
//! * [`adversaries`] generates oblivious loss sequences and adaptive
//!   adversaries.
//! * [`harness`] runs games, replicates them in parallel, aggregates
//!   statistics and checks the structural inequalities every FPL run obeys.

pub mod adversaries;
pub mod bandit;
pub mod batching;
pub mod combinatorial;
pub mod config;
pub mod error;
pub mod experts;
pub mod game;
pub mod harness;
pub mod seed;
mod util;

pub use error::{Error, Result};
pub use game::{
    best_action_in_hindsight, loss_range, regret_of, switches_of, switching_cost_objective,
    ActionId, LossMatrix, LossVector, RunTrace,
};
pub use seed::{Role, SeedSpec, StreamRng, StreamSeed};
