use serde::{Deserialize, Serialize};

use super::{check_own_loss, BanditPolicy};
use crate::error::{Error, Result};
use crate::experts::Protocol;
use crate::game::ActionId;
use crate::seed::{StreamRng, StreamSeed};
use crate::util::sample_weighted;

/// Largest exploration rate the default tuning produces.
pub const GAMMA_CAP: f64 = 0.999;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exp3PParams {
    pub eta: f64,
    pub gamma: f64,
    pub beta: f64,
    pub horizon: usize,
    pub arms: usize,
}

impl Exp3PParams {
    /// Standard high-probability tuning for `horizon` rounds:
    /// `eta = 0.95 sqrt(ln n / (n T))`, `gamma = 1.05 sqrt(n ln n / T)` (capped
    /// at [`GAMMA_CAP`]), `beta = sqrt(ln(n / delta) / (n T))`.
    pub fn tuned(arms: usize, horizon: usize, delta: f64) -> Result<Self> {
        if arms < 2 {
            return Err(Error::param("n", format!("needs at least two arms, got {arms}")));
        }
        if horizon == 0 {
            return Err(Error::param("T", "horizon must be >= 1"));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::param("delta", format!("must lie in (0, 1), got {delta}")));
        }
        let n = arms as f64;
        let t = horizon as f64;
        let ln_n = n.ln();
        Ok(Exp3PParams {
            eta: 0.95 * (ln_n / (n * t)).sqrt(),
            gamma: (1.05 * (n * ln_n / t).sqrt()).min(GAMMA_CAP),
            beta: ((n / delta).ln() / (n * t)).sqrt(),
            horizon,
            arms,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.arms == 0 {
            return Err(Error::param("n", "needs at least one arm"));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::param("eta_b", format!("must be > 0, got {}", self.eta)));
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(Error::param("gamma", format!("must lie in [0, 1), got {}", self.gamma)));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::param("beta", format!("must be >= 0, got {}", self.beta)));
        }
        Ok(())
    }
}

/// Exp3.P in loss form.
///
/// Samples from `(1 - gamma) softmax(-eta L) + gamma / n`, where `L` holds the
/// cumulative estimates `(l 1{I = i} - beta) / p_i`.
#[derive(Debug, Clone)]
pub struct Exp3P {
    params: Exp3PParams,
    estimates: Vec<f64>,
    probs: Vec<f64>,
    played: usize,
    rng: StreamRng,
    protocol: Protocol,
}

pub fn exp3p_policy(params: Exp3PParams) -> Result<Exp3P> {
    params.validate()?;
    let mut p = Exp3P {
        params,
        estimates: vec![0.0; params.arms],
        probs: vec![0.0; params.arms],
        played: 0,
        rng: StreamSeed::new(0, 0).rng(),
        protocol: Protocol::default(),
    };
    p.refresh();
    Ok(p)
}

impl Exp3P {
    pub fn params(&self) -> &Exp3PParams {
        &self.params
    }

    pub fn estimates(&self) -> &[f64] {
        &self.estimates
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    fn refresh(&mut self) {
        let Exp3PParams { eta, gamma, arms, .. } = self.params;
        let floor = self
            .estimates
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let mut total = 0.0;
        for (p, &l) in self.probs.iter_mut().zip(&self.estimates) {
            *p = (-eta * (l - floor)).exp();
            total += *p;
        }
        let uniform = gamma / arms as f64;
        for p in &mut self.probs {
            *p = (1.0 - gamma) * *p / total + uniform;
        }
    }

    /// Applies the estimate update for `arm` having incurred `loss` under the
    /// current distribution, without touching the protocol state.
    pub fn update(&mut self, arm: ActionId, loss: f64) -> Result<()> {
        check_own_loss(loss)?;
        if arm.index() >= self.params.arms {
            return Err(Error::DimensionMismatch(format!(
                "arm {arm} of {}",
                self.params.arms
            )));
        }
        let beta = self.params.beta;
        for (i, (l, &p)) in self.estimates.iter_mut().zip(&self.probs).enumerate() {
            let hit = if i == arm.index() { loss } else { 0.0 };
            *l += (hit - beta) / p;
        }
        self.refresh();
        Ok(())
    }
}

impl BanditPolicy for Exp3P {
    fn reset(&mut self, seed: StreamSeed) {
        self.rng = seed.rng();
        self.estimates.fill(0.0);
        self.protocol.reset();
        self.refresh();
    }

    fn choose(&mut self) -> Result<ActionId> {
        self.protocol.on_choose()?;
        self.played = sample_weighted(&mut self.rng, &self.probs);
        Ok(ActionId::new(self.played))
    }

    fn observe(&mut self, loss: f64) -> Result<()> {
        self.protocol.on_observe(1, 1)?;
        self.update(ActionId::new(self.played), loss)
    }

    fn distribution(&self) -> Option<Vec<f64>> {
        Some(self.probs.clone())
    }
}
