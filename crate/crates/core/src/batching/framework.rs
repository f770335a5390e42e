use super::EpochPlan;
use crate::error::{Error, Result};
use crate::experts::{FplEpoch, FplRecord, OnlinePolicy};
use crate::seed::StreamSeed;

/// Batched restarts of a base learner.
///
/// Each epoch is charged one unit for its first round (the possible change
/// from the previous epoch's last action) and one unit per switch inside the
/// epoch. The epoch ends after the round whose charge reaches the quota, and
/// the next round starts a base instance reset on sub-stream `e` of the
/// wrapper's seed, with an empty loss history.
#[derive(Debug, Clone)]
pub struct Framework<P: OnlinePolicy> {
    base: P,
    quota: usize,
    seed: StreamSeed,
    epoch: u32,
    charge: usize,
    last: Option<P::Action>,
    round: usize,
    epoch_start: usize,
    restart_pending: bool,
    finished: Vec<(usize, usize)>,
    records: Vec<FplEpoch<P::Action>>,
    records_complete: bool,
    recording: bool,
}

pub fn framework_restart<P: OnlinePolicy>(base: P, quota: usize) -> Result<Framework<P>> {
    if quota == 0 {
        return Err(Error::param("quota", "per-epoch switch quota must be >= 1"));
    }
    let mut fw = Framework {
        base,
        quota,
        seed: StreamSeed::new(0, 0),
        epoch: 1,
        charge: 0,
        last: None,
        round: 0,
        epoch_start: 0,
        restart_pending: false,
        finished: Vec::new(),
        records: Vec::new(),
        records_complete: true,
        recording: true,
    };
    fw.reset(StreamSeed::new(0, 0));
    Ok(fw)
}

impl<P: OnlinePolicy> Framework<P> {
    pub fn quota(&self) -> usize {
        self.quota
    }

    pub fn base(&self) -> &P {
        &self.base
    }

    fn start_next_epoch(&mut self) {
        if self.recording {
            match self.base.fpl_record() {
                Some(rec) => self.records.extend(rec.shifted(self.epoch_start).epochs),
                None => self.records_complete = false,
            }
        }
        self.finished.push((self.epoch_start + 1, self.round));
        self.epoch += 1;
        self.base.reset(self.seed.child(u64::from(self.epoch)));
        self.epoch_start = self.round;
        self.charge = 0;
        self.restart_pending = false;
    }
}

impl<P: OnlinePolicy> OnlinePolicy for Framework<P> {
    type Action = P::Action;

    fn reset(&mut self, seed: StreamSeed) {
        self.seed = seed;
        self.epoch = 1;
        self.charge = 0;
        self.last = None;
        self.round = 0;
        self.epoch_start = 0;
        self.restart_pending = false;
        self.finished.clear();
        self.records.clear();
        self.records_complete = true;
        self.base.reset(seed.child(1));
    }

    fn choose(&mut self) -> Result<P::Action> {
        if self.restart_pending {
            self.start_next_epoch();
        }
        let action = self.base.choose()?;
        if self.round == self.epoch_start || self.last.as_ref() != Some(&action) {
            self.charge += 1;
        }
        self.last = Some(action.clone());
        Ok(action)
    }

    fn observe(&mut self, losses: &[f64]) -> Result<()> {
        self.base.observe(losses)?;
        self.round += 1;
        if self.charge >= self.quota {
            self.restart_pending = true;
        }
        Ok(())
    }

    fn epoch(&self) -> u32 {
        self.epoch
    }

    fn fpl_record(&self) -> Option<FplRecord<P::Action>> {
        if !self.recording || !self.records_complete {
            return None;
        }
        let current = self.base.fpl_record()?.shifted(self.epoch_start);
        let mut epochs = self.records.clone();
        epochs.extend(current.epochs);
        Some(FplRecord { epochs })
    }

    fn epoch_plan(&self) -> Option<EpochPlan> {
        let mut boundaries = self.finished.clone();
        if self.round > self.epoch_start {
            boundaries.push((self.epoch_start + 1, self.round));
        }
        Some(EpochPlan {
            quota: self.quota,
            boundaries,
        })
    }

    fn set_recording(&mut self, on: bool) {
        self.recording = on;
        self.base.set_recording(on);
        if !on {
            self.records = Vec::new();
        }
    }
}
