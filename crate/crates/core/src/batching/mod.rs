//! Wrappers that control how often a learner may switch.
//!
//! * [`Framework`] restarts a base learner with fresh randomness whenever it
//!   spends its per-epoch switch quota.
//! * [`BudgetCap`] freezes the played action once a hard switch budget is used.
//! * [`UniformMinibatch`] holds each base decision for a fixed batch of rounds.
//!
//! [`bmfpl`], [`bpr`] and the `pfe_budget*` constructors compose these.

mod budget;
mod cap;
mod framework;
mod minibatch;

use serde::{Deserialize, Serialize};

pub use budget::{
    bmfpl, bmfpl_params, bpr, bpr_quota, pfe_budget, pfe_budget_high, pfe_budget_low,
    BudgetBase, ConstantPolicy, BMFPL_QUOTA_CONST, BPR_QUOTA_CONST,
};
pub use cap::{budget_cap, BudgetCap};
pub use framework::{framework_restart, Framework};
pub use minibatch::{uniform_minibatch, UniformMinibatch};

use crate::error::{Error, Result};

/// Realised epochs of a restarting learner.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpochPlan {
    /// Per-epoch switch quota `S'`.
    pub quota: usize,
    /// `(start, end)` rounds of each epoch, one-based and inclusive.
    pub boundaries: Vec<(usize, usize)>,
}

impl EpochPlan {
    pub fn epoch_count(&self) -> usize {
        self.boundaries.len()
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.boundaries.iter().map(|&(s, e)| e + 1 - s).collect()
    }
}

/// Batch length and number of meta-rounds for a horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchPlan {
    pub batch_len: usize,
    pub meta_rounds: usize,
}

impl BatchPlan {
    pub fn new(horizon: usize, batch_len: usize) -> Result<Self> {
        if batch_len == 0 {
            return Err(Error::param("B", "batch length must be >= 1"));
        }
        if horizon == 0 {
            return Err(Error::param("T", "horizon must be >= 1"));
        }
        Ok(BatchPlan {
            batch_len,
            meta_rounds: horizon.div_ceil(batch_len),
        })
    }
}
