//! Loss generators.
//!
//! Oblivious adversaries are pure functions of `(T, n, parameters, seed)`
//! returning a whole [`LossMatrix`]. Adaptive adversaries implement
//! [`AdaptiveAdversary`] and may look at the player's past actions.

mod io;
mod mrw;
mod oblivious;

pub use io::{read_matrix, read_matrix_csv, write_matrix, write_matrix_csv};
pub use mrw::{
    clip, dyadic_valuation, mrw_adversary, mrw_walk, walk_from_noise, walk_with_parent,
    MrwParams, MRW_EPS_MAX,
};
pub use oblivious::{
    alternating_two_action, batched_bernoulli, default_batched_epochs, gap_bernoulli,
    iid_bernoulli, sd_tail_adversary, sd_tail_threshold,
};

use crate::error::{Error, Result};
use crate::game::ActionId;
use crate::seed::StreamSeed;

/// An adversary that picks round `t`'s losses after seeing the player's
/// actions in rounds `1..t`.
pub trait AdaptiveAdversary: Send {
    fn actions(&self) -> usize;

    fn reset(&mut self, seed: StreamSeed);

    /// Writes round `history.len() + 1`'s losses into `out`.
    fn losses(&mut self, history: &[ActionId], out: &mut [f64]) -> Result<()>;
}

/// Gives loss 1 to whatever the player did last round, 0 elsewhere; round 1 is
/// all zeros.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FollowPunisher {
    n: usize,
}

pub fn follow_punisher(n: usize) -> Result<FollowPunisher> {
    if n < 2 {
        return Err(Error::param("n", format!("needs at least two actions, got {n}")));
    }
    Ok(FollowPunisher { n })
}

impl AdaptiveAdversary for FollowPunisher {
    fn actions(&self) -> usize {
        self.n
    }

    fn reset(&mut self, _seed: StreamSeed) {}

    fn losses(&mut self, history: &[ActionId], out: &mut [f64]) -> Result<()> {
        if out.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "loss buffer of length {}, expected {}",
                out.len(),
                self.n
            )));
        }
        out.fill(0.0);
        if let Some(prev) = history.last() {
            out[prev.index()] = 1.0;
        }
        Ok(())
    }
}
