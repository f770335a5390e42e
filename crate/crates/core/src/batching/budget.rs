use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{budget_cap, framework_restart, uniform_minibatch, BudgetCap, Framework, UniformMinibatch};
use crate::error::{Error, Result};
use crate::experts::{mfpl_policy, pr_policy, BoxedPolicy, ExpertOracle, Fpl, OnlinePolicy};
use crate::game::ActionId;
use crate::seed::StreamSeed;
use crate::util::ceil_tol;

pub const BMFPL_QUOTA_CONST: f64 = 135.0;
pub const BPR_QUOTA_CONST: f64 = 322.0;

fn check_game(horizon: usize, n: usize, delta: f64) -> Result<()> {
    if horizon == 0 {
        return Err(Error::param("T", "horizon must be >= 1"));
    }
    if n < 2 {
        return Err(Error::param("n", format!("needs at least two actions, got {n}")));
    }
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::param("delta", format!("must lie in (0, 1/2), got {delta}")));
    }
    Ok(())
}

fn quota_for(constant: f64, horizon: usize, n: usize, delta: f64) -> usize {
    let ln_n = (n as f64).ln();
    let big_n = (2.0 / delta).ln();
    ceil_tol(constant * (horizon as f64 * ln_n / big_n).sqrt()) as usize
}

fn check_override(quota: Option<usize>) -> Result<()> {
    if quota == Some(0) {
        return Err(Error::param("quota", "per-epoch switch quota must be >= 1"));
    }
    Ok(())
}

/// `(epsilon, S')` of the batched MFPL learner.
pub fn bmfpl_params(horizon: usize, n: usize, delta: f64) -> Result<(f64, usize)> {
    check_game(horizon, n, delta)?;
    let epsilon = 0.5 * ((n as f64).ln() * (2.0 / delta).ln() / horizon as f64).sqrt();
    Ok((epsilon, quota_for(BMFPL_QUOTA_CONST, horizon, n, delta)))
}

/// `S'` of the batched PR learner.
pub fn bpr_quota(horizon: usize, n: usize, delta: f64) -> Result<usize> {
    check_game(horizon, n, delta)?;
    Ok(quota_for(BPR_QUOTA_CONST, horizon, n, delta))
}

/// Batched restarts of MFPL; `quota` overrides the default `S'`.
pub fn bmfpl(
    horizon: usize,
    n: usize,
    delta: f64,
    quota: Option<usize>,
) -> Result<Framework<Fpl<ExpertOracle>>> {
    let (epsilon, default_quota) = bmfpl_params(horizon, n, delta)?;
    check_override(quota)?;
    framework_restart(mfpl_policy(n, epsilon)?, quota.unwrap_or(default_quota))
}

/// Batched restarts of PR; `quota` overrides the default `S'`.
pub fn bpr(
    horizon: usize,
    n: usize,
    delta: f64,
    quota: Option<usize>,
) -> Result<Framework<Fpl<ExpertOracle>>> {
    let default_quota = bpr_quota(horizon, n, delta)?;
    check_override(quota)?;
    framework_restart(pr_policy(n)?, quota.unwrap_or(default_quota))
}

/// Base learner of the budget compositions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum BudgetBase {
    #[default]
    Bmfpl,
    Bpr,
}

impl FromStr for BudgetBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bmfpl" => Ok(BudgetBase::Bmfpl),
            "bpr" => Ok(BudgetBase::Bpr),
            other => Err(Error::param("base", format!("expected bmfpl or bpr, got `{other}`"))),
        }
    }
}

impl fmt::Display for BudgetBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BudgetBase::Bmfpl => "bmfpl",
            BudgetBase::Bpr => "bpr",
        })
    }
}

pub type HighRegimePolicy = BudgetCap<UniformMinibatch<Framework<Fpl<ExpertOracle>>>>;

fn high_unchecked(
    horizon: usize,
    n: usize,
    budget: usize,
    delta: f64,
    base: BudgetBase,
) -> Result<HighRegimePolicy> {
    check_game(horizon, n, delta)?;
    let batch = (ceil_tol((2.0 / delta).ln()) as usize).min(horizon);
    let meta = horizon.div_ceil(batch);
    let inner = match base {
        BudgetBase::Bmfpl => bmfpl(meta, n, delta, None)?,
        BudgetBase::Bpr => bpr(meta, n, delta, None)?,
    };
    Ok(budget_cap(uniform_minibatch(inner, batch, horizon)?, budget))
}

fn check_budget(horizon: usize, budget: usize) -> Result<()> {
    if budget > horizon {
        return Err(Error::param("S", format!("budget {budget} exceeds the horizon {horizon}")));
    }
    Ok(())
}

/// High-switching budget learner: the batched learner on batches of
/// `ceil(ln(2/delta))` rounds, capped at `S` switches.
///
/// Requires `S >= kappa * sqrt(T ln n)`.
pub fn pfe_budget_high(
    horizon: usize,
    n: usize,
    budget: usize,
    delta: f64,
    kappa: f64,
    base: BudgetBase,
) -> Result<HighRegimePolicy> {
    check_game(horizon, n, delta)?;
    check_budget(horizon, budget)?;
    let threshold = kappa * (horizon as f64 * (n as f64).ln()).sqrt();
    if (budget as f64) < threshold {
        return Err(Error::param(
            "S",
            format!("regime mismatch: high-switching learner needs S >= {threshold:.2}, got {budget}"),
        ));
    }
    high_unchecked(horizon, n, budget, delta, base)
}

/// Low-switching budget learner: batches of `ceil(T ln n / S^2)` rounds over
/// the high-switching learner on the meta-game. `S = 0` plays action 1.
pub fn pfe_budget_low(
    horizon: usize,
    n: usize,
    budget: usize,
    delta: f64,
    base: BudgetBase,
) -> Result<BoxedPolicy> {
    check_game(horizon, n, delta)?;
    check_budget(horizon, budget)?;
    if budget == 0 {
        return Ok(Box::new(ConstantPolicy::new(ActionId::new(0))));
    }
    let meta_target = (budget as f64).powi(2) / (n as f64).ln();
    let batch = (ceil_tol(horizon as f64 / meta_target) as usize).clamp(1, horizon);
    let meta = horizon.div_ceil(batch);
    let inner = high_unchecked(meta, n, budget.min(meta), delta, base)?;
    Ok(Box::new(uniform_minibatch(inner, batch, horizon)?))
}

/// Picks the high- or low-switching learner by comparing `S` with
/// `kappa * sqrt(T ln n)`.
pub fn pfe_budget(
    horizon: usize,
    n: usize,
    budget: usize,
    delta: f64,
    kappa: f64,
    base: BudgetBase,
) -> Result<BoxedPolicy> {
    check_game(horizon, n, delta)?;
    let threshold = kappa * (horizon as f64 * (n as f64).ln()).sqrt();
    if budget as f64 >= threshold {
        Ok(Box::new(pfe_budget_high(horizon, n, budget, delta, kappa, base)?))
    } else {
        pfe_budget_low(horizon, n, budget, delta, base)
    }
}

/// Plays one fixed action forever.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstantPolicy {
    action: ActionId,
}

impl ConstantPolicy {
    pub fn new(action: ActionId) -> Self {
        ConstantPolicy { action }
    }
}

impl OnlinePolicy for ConstantPolicy {
    type Action = ActionId;

    fn reset(&mut self, _seed: StreamSeed) {}

    fn choose(&mut self) -> Result<ActionId> {
        Ok(self.action)
    }

    fn observe(&mut self, _losses: &[f64]) -> Result<()> {
        Ok(())
    }
}
