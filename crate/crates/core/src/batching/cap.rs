use crate::error::Result;
use crate::experts::{FplRecord, OnlinePolicy};
use crate::seed::StreamSeed;

/// Follows `base` until `budget` switches are spent, then keeps playing the
/// current action. The base keeps observing every round.
#[derive(Debug, Clone)]
pub struct BudgetCap<P: OnlinePolicy> {
    base: P,
    budget: usize,
    used: usize,
    current: Option<P::Action>,
    diverged: bool,
}

pub fn budget_cap<P: OnlinePolicy>(base: P, budget: usize) -> BudgetCap<P> {
    BudgetCap {
        base,
        budget,
        used: 0,
        current: None,
        diverged: false,
    }
}

impl<P: OnlinePolicy> BudgetCap<P> {
    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn switches_used(&self) -> usize {
        self.used
    }
}

impl<P: OnlinePolicy> OnlinePolicy for BudgetCap<P> {
    type Action = P::Action;

    fn reset(&mut self, seed: StreamSeed) {
        self.used = 0;
        self.current = None;
        self.diverged = false;
        self.base.reset(seed);
    }

    fn choose(&mut self) -> Result<P::Action> {
        let proposal = self.base.choose()?;
        let action = match self.current.take() {
            None => proposal,
            Some(cur) if cur == proposal => cur,
            Some(_) if self.used < self.budget => {
                self.used += 1;
                proposal
            }
            Some(cur) => {
                self.diverged = true;
                cur
            }
        };
        self.current = Some(action.clone());
        Ok(action)
    }

    fn observe(&mut self, losses: &[f64]) -> Result<()> {
        self.base.observe(losses)
    }

    fn epoch(&self) -> u32 {
        self.base.epoch()
    }

    /// The base's record, as long as the cap has never overridden it.
    fn fpl_record(&self) -> Option<FplRecord<P::Action>> {
        if self.diverged {
            None
        } else {
            self.base.fpl_record()
        }
    }

    fn epoch_plan(&self) -> Option<super::EpochPlan> {
        self.base.epoch_plan()
    }

    fn set_recording(&mut self, on: bool) {
        self.base.set_recording(on)
    }
}
