use rand::Rng;

use super::{FplRecord, OnlinePolicy};
use crate::error::{Error, Result};
use crate::game::ActionId;
use crate::seed::StreamSeed;

/// With probability `p` plays a designated bad action for the first
/// `bad_rounds` rounds, then hands over to `base`; otherwise plays `base`
/// throughout.
///
/// The base learner sees only its own `base_actions` leading coordinates and
/// does not observe the rounds spent on the bad action. Its random stream is
/// the wrapper's own seed, so with `p = 0` the trace equals the base's trace.
#[derive(Debug, Clone)]
pub struct LaggedWrapper<P> {
    base: P,
    p: f64,
    bad_rounds: usize,
    bad_action: ActionId,
    base_actions: usize,
    lagging: bool,
    round: usize,
}

/// `bad_action` is either the reserved extra action `base_actions + 1` of a
/// widened game, or an action of the base game that the adversary keeps worst.
pub fn lagged_wrapper<P: OnlinePolicy<Action = ActionId>>(
    base: P,
    base_actions: usize,
    bad_action: ActionId,
    p: f64,
    bad_rounds: usize,
    horizon: usize,
) -> Result<LaggedWrapper<P>> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param("p", format!("must lie in [0, 1], got {p}")));
    }
    if bad_rounds > horizon {
        return Err(Error::param(
            "bad_rounds",
            format!("{bad_rounds} exceeds the horizon {horizon}"),
        ));
    }
    if bad_action.index() > base_actions {
        return Err(Error::param(
            "bad_action",
            format!("{bad_action} is neither a base action nor the reserved one"),
        ));
    }
    Ok(LaggedWrapper {
        base,
        p,
        bad_rounds,
        bad_action,
        base_actions,
        lagging: false,
        round: 0,
    })
}

impl<P> LaggedWrapper<P> {
    /// Whether this run drew the bad phase.
    pub fn lagging(&self) -> bool {
        self.lagging
    }

    fn in_bad_phase(&self) -> bool {
        self.lagging && self.round < self.bad_rounds
    }
}

impl<P: OnlinePolicy<Action = ActionId>> OnlinePolicy for LaggedWrapper<P> {
    type Action = ActionId;

    fn reset(&mut self, seed: StreamSeed) {
        let mut coin = seed.child(0).rng();
        self.lagging = coin.random::<f64>() < self.p;
        self.round = 0;
        self.base.reset(seed);
    }

    fn choose(&mut self) -> Result<ActionId> {
        if self.in_bad_phase() {
            Ok(self.bad_action)
        } else {
            self.base.choose()
        }
    }

    fn observe(&mut self, losses: &[f64]) -> Result<()> {
        if losses.len() < self.base_actions {
            return Err(Error::DimensionMismatch(format!(
                "loss vector of length {}, expected at least {}",
                losses.len(),
                self.base_actions
            )));
        }
        if !self.in_bad_phase() {
            self.base.observe(&losses[..self.base_actions])?;
        }
        self.round += 1;
        Ok(())
    }

    fn epoch(&self) -> u32 {
        self.base.epoch()
    }

    fn fpl_record(&self) -> Option<FplRecord<ActionId>> {
        if self.lagging && self.bad_rounds > 0 {
            None
        } else {
            self.base.fpl_record()
        }
    }

    fn set_recording(&mut self, on: bool) {
        self.base.set_recording(on)
    }
}
