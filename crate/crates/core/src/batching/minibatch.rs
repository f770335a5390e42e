use super::BatchPlan;
use crate::error::{Error, Result};
use crate::experts::OnlinePolicy;
use crate::seed::StreamSeed;

/// Plays one base decision per batch of `B` rounds and feeds the base the
/// batch's average loss vector. The last batch may be shorter.
#[derive(Debug, Clone)]
pub struct UniformMinibatch<P: OnlinePolicy> {
    base: P,
    plan: BatchPlan,
    horizon: usize,
    round: usize,
    in_batch: usize,
    current: Option<P::Action>,
    sums: Vec<f64>,
}

pub fn uniform_minibatch<P: OnlinePolicy>(
    base: P,
    batch_len: usize,
    horizon: usize,
) -> Result<UniformMinibatch<P>> {
    Ok(UniformMinibatch {
        base,
        plan: BatchPlan::new(horizon, batch_len)?,
        horizon,
        round: 0,
        in_batch: 0,
        current: None,
        sums: Vec::new(),
    })
}

impl<P: OnlinePolicy> UniformMinibatch<P> {
    pub fn plan(&self) -> BatchPlan {
        self.plan
    }

    pub fn base(&self) -> &P {
        &self.base
    }

    fn flush(&mut self) -> Result<()> {
        let k = self.in_batch as f64;
        let avg: Vec<f64> = self.sums.iter().map(|s| s / k).collect();
        self.base.observe(&avg)?;
        self.in_batch = 0;
        self.current = None;
        Ok(())
    }
}

impl<P: OnlinePolicy> OnlinePolicy for UniformMinibatch<P> {
    type Action = P::Action;

    fn reset(&mut self, seed: StreamSeed) {
        self.round = 0;
        self.in_batch = 0;
        self.current = None;
        self.sums.clear();
        self.base.reset(seed);
    }

    fn choose(&mut self) -> Result<P::Action> {
        if self.round >= self.horizon {
            return Err(Error::Protocol(format!(
                "round {} is past the horizon {}",
                self.round + 1,
                self.horizon
            )));
        }
        match &self.current {
            Some(a) => Ok(a.clone()),
            None => {
                let a = self.base.choose()?;
                self.current = Some(a.clone());
                Ok(a)
            }
        }
    }

    fn observe(&mut self, losses: &[f64]) -> Result<()> {
        if self.current.is_none() {
            return Err(Error::Protocol("observe called before choose".into()));
        }
        if self.in_batch == 0 {
            self.sums.clear();
            self.sums.resize(losses.len(), 0.0);
        } else if self.sums.len() != losses.len() {
            return Err(Error::DimensionMismatch(format!(
                "loss vector of length {}, expected {}",
                losses.len(),
                self.sums.len()
            )));
        }
        for (s, l) in self.sums.iter_mut().zip(losses) {
            *s += l;
        }
        self.in_batch += 1;
        self.round += 1;
        if self.in_batch == self.plan.batch_len || self.round == self.horizon {
            self.flush()?;
        }
        Ok(())
    }

    fn epoch(&self) -> u32 {
        self.base.epoch()
    }

    fn set_recording(&mut self, on: bool) {
        self.base.set_recording(on)
    }
}
