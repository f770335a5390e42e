//! Bandit-feedback learners: they see only the loss of the arm they played.

mod batched;
mod exp3p;

use rand::Rng;

pub use batched::{
    bandit_switching_cost_run, batched_bandit, batched_exp3p, exp3p_switching_cost,
    switching_cost_budget, BatchedBandit,
};
pub use exp3p::{exp3p_policy, Exp3P, Exp3PParams, GAMMA_CAP};

use crate::error::{Error, Result};
use crate::game::ActionId;
use crate::seed::{StreamRng, StreamSeed};

/// A learner that observes only its own incurred loss.
pub trait BanditPolicy: Send {
    fn reset(&mut self, seed: StreamSeed);

    fn choose(&mut self) -> Result<ActionId>;

    /// Loss of the arm played in the round just finished.
    fn observe(&mut self, loss: f64) -> Result<()>;

    /// Current sampling distribution, when the learner has one.
    fn distribution(&self) -> Option<Vec<f64>> {
        None
    }
}

pub type BoxedBandit = Box<dyn BanditPolicy>;

impl<P: BanditPolicy + ?Sized> BanditPolicy for Box<P> {
    fn reset(&mut self, seed: StreamSeed) {
        (**self).reset(seed)
    }

    fn choose(&mut self) -> Result<ActionId> {
        (**self).choose()
    }

    fn observe(&mut self, loss: f64) -> Result<()> {
        (**self).observe(loss)
    }

    fn distribution(&self) -> Option<Vec<f64>> {
        (**self).distribution()
    }
}

pub(crate) fn check_own_loss(loss: f64) -> Result<()> {
    if (0.0..=1.0).contains(&loss) {
        Ok(())
    } else {
        Err(Error::LossOutOfRange {
            round: 0,
            action: 0,
            value: loss,
        })
    }
}

/// Plays an independent uniformly random arm every round.
#[derive(Debug, Clone)]
pub struct UniformBandit {
    arms: usize,
    rng: StreamRng,
}

impl UniformBandit {
    pub fn new(arms: usize) -> Result<Self> {
        if arms == 0 {
            return Err(Error::param("n", "needs at least one arm"));
        }
        Ok(UniformBandit {
            arms,
            rng: StreamSeed::new(0, 0).rng(),
        })
    }
}

impl BanditPolicy for UniformBandit {
    fn reset(&mut self, seed: StreamSeed) {
        self.rng = seed.rng();
    }

    fn choose(&mut self) -> Result<ActionId> {
        Ok(ActionId::new(self.rng.random_range(0..self.arms)))
    }

    fn observe(&mut self, loss: f64) -> Result<()> {
        check_own_loss(loss)
    }

    fn distribution(&self) -> Option<Vec<f64>> {
        Some(vec![1.0 / self.arms as f64; self.arms])
    }
}
