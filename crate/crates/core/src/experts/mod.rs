//! Full-information learners.
//!
//! Every learner implements [`OnlinePolicy`]: `reset` with a seed stream,
//! then alternate `choose` and `observe` once per round. Learners over the
//! plain expert action set are [`FullInfoPolicy`]s; the combinatorial
//! learners reuse the same trait with vertex-valued actions.

mod fpl;
mod lagged;
mod sd;

use std::fmt::Debug;

pub use fpl::{
    ftl_choose, ftl_policy, fpl_policy, mfpl_policy, pr_policy, ExpertOracle, Fpl, FplEpoch,
    FplRecord, LinearOracle, PerturbationSchedule,
};
pub use lagged::{lagged_wrapper, LaggedWrapper};
pub use sd::{sd_policy, SdPolicy};

use crate::batching::EpochPlan;
use crate::error::{Error, Result};
use crate::game::ActionId;
use crate::seed::StreamSeed;

/// A learner in a repeated game with full-vector feedback.
pub trait OnlinePolicy: Send {
    type Action: Clone + PartialEq + Debug + Send + Sync;

    /// Starts a new game on the given random stream, forgetting all history.
    fn reset(&mut self, seed: StreamSeed);

    /// Action for the current round.
    fn choose(&mut self) -> Result<Self::Action>;

    /// Feedback for the round just played.
    fn observe(&mut self, losses: &[f64]) -> Result<()>;

    /// Epoch id of the round most recently chosen (1 for non-restarting learners).
    fn epoch(&self) -> u32 {
        1
    }

    /// Realised perturbations, when the learner is a perturbed leader.
    fn fpl_record(&self) -> Option<FplRecord<Self::Action>> {
        None
    }

    /// Realised epochs, when the learner restarts.
    fn epoch_plan(&self) -> Option<EpochPlan> {
        None
    }

    /// Turns perturbation recording on or off; off saves memory in long runs.
    fn set_recording(&mut self, _on: bool) {}
}

/// A learner over the actions `1..=n`.
pub trait FullInfoPolicy: OnlinePolicy<Action = ActionId> {}

impl<P: OnlinePolicy<Action = ActionId> + ?Sized> FullInfoPolicy for P {}

pub type BoxedPolicy = Box<dyn OnlinePolicy<Action = ActionId>>;

impl<P: OnlinePolicy + ?Sized> OnlinePolicy for Box<P> {
    type Action = P::Action;

    fn reset(&mut self, seed: StreamSeed) {
        (**self).reset(seed)
    }

    fn choose(&mut self) -> Result<Self::Action> {
        (**self).choose()
    }

    fn observe(&mut self, losses: &[f64]) -> Result<()> {
        (**self).observe(losses)
    }

    fn epoch(&self) -> u32 {
        (**self).epoch()
    }

    fn fpl_record(&self) -> Option<FplRecord<Self::Action>> {
        (**self).fpl_record()
    }

    fn epoch_plan(&self) -> Option<EpochPlan> {
        (**self).epoch_plan()
    }

    fn set_recording(&mut self, on: bool) {
        (**self).set_recording(on)
    }
}

/// Enforces the choose/observe alternation.
#[derive(Debug, Clone, Default)]
pub(crate) struct Protocol {
    round: usize,
    awaiting_feedback: bool,
}

impl Protocol {
    pub(crate) fn reset(&mut self) {
        *self = Protocol::default();
    }

    /// Zero-based index of the current round.
    pub(crate) fn round(&self) -> usize {
        self.round
    }

    pub(crate) fn on_choose(&mut self) -> Result<()> {
        if self.awaiting_feedback {
            return Err(Error::Protocol(format!(
                "choose called twice in round {}",
                self.round + 1
            )));
        }
        self.awaiting_feedback = true;
        Ok(())
    }

    pub(crate) fn on_observe(&mut self, got: usize, expected: usize) -> Result<()> {
        if !self.awaiting_feedback {
            return Err(Error::Protocol(format!(
                "observe called before choose in round {}",
                self.round + 1
            )));
        }
        if got != expected {
            return Err(Error::DimensionMismatch(format!(
                "loss vector of length {got}, expected {expected}"
            )));
        }
        self.awaiting_feedback = false;
        self.round += 1;
        Ok(())
    }
}
