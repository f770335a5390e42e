use rand::Rng;

use super::{OnlinePolicy, Protocol};
use crate::error::{Error, Result};
use crate::game::ActionId;
use crate::seed::{StreamRng, StreamSeed};
use crate::util::sample_weighted;

/// Shrinking Dartboard.
///
/// Weights are `(1 - eta)^{cumulative loss}`. The first action is uniform;
/// afterwards the previous action is kept with probability
/// `(1 - eta)^{its last loss}` and otherwise the action is redrawn from the
/// normalised weights (possibly landing on the same action).
#[derive(Debug, Clone)]
pub struct SdPolicy {
    eta: f64,
    cumulative: Vec<f64>,
    weights: Vec<f64>,
    current: Option<usize>,
    last_loss: f64,
    rng: StreamRng,
    protocol: Protocol,
}

pub fn sd_policy(n: usize, eta: f64) -> Result<SdPolicy> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::param("eta", format!("must lie in (0, 1), got {eta}")));
    }
    if n == 0 {
        return Err(Error::param("n", "action set is empty"));
    }
    Ok(SdPolicy {
        eta,
        cumulative: vec![0.0; n],
        weights: vec![1.0; n],
        current: None,
        last_loss: 0.0,
        rng: StreamSeed::new(0, 0).rng(),
        protocol: Protocol::default(),
    })
}

impl SdPolicy {
    pub fn eta(&self) -> f64 {
        self.eta
    }

    fn redraw(&mut self) -> usize {
        let log_keep = (1.0 - self.eta).ln();
        let floor = self
            .cumulative
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        for (w, &c) in self.weights.iter_mut().zip(&self.cumulative) {
            *w = ((c - floor) * log_keep).exp();
        }
        sample_weighted(&mut self.rng, &self.weights)
    }
}

impl OnlinePolicy for SdPolicy {
    type Action = ActionId;

    fn reset(&mut self, seed: StreamSeed) {
        self.rng = seed.rng();
        self.cumulative.fill(0.0);
        self.current = None;
        self.last_loss = 0.0;
        self.protocol.reset();
    }

    fn choose(&mut self) -> Result<ActionId> {
        self.protocol.on_choose()?;
        let next = match self.current {
            None => self.rng.random_range(0..self.cumulative.len()),
            Some(prev) => {
                let keep = (1.0 - self.eta).powf(self.last_loss);
                if self.rng.random::<f64>() < keep {
                    prev
                } else {
                    self.redraw()
                }
            }
        };
        self.current = Some(next);
        Ok(ActionId::new(next))
    }

    fn observe(&mut self, losses: &[f64]) -> Result<()> {
        self.protocol.on_observe(losses.len(), self.cumulative.len())?;
        for (c, l) in self.cumulative.iter_mut().zip(losses) {
            *c += l;
        }
        if let Some(cur) = self.current {
            self.last_loss = losses[cur];
        }
        Ok(())
    }
}
