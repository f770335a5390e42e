use super::{exp3p_policy, BanditPolicy, Exp3P, Exp3PParams};
use crate::error::{Error, Result};
use crate::game::{switching_cost_objective, ActionId, LossMatrix, RunTrace};
use crate::harness::run_bandit;
use crate::seed::StreamSeed;

/// Splits the horizon into blocks of `ceil(T / S)` rounds (the last one may be
/// shorter), plays one base arm per block and feeds the base the block's
/// average own loss. At most `S - 1` switches.
#[derive(Debug, Clone)]
pub struct BatchedBandit<P> {
    base: P,
    block: usize,
    blocks: usize,
    horizon: usize,
    round: usize,
    in_block: usize,
    sum: f64,
    current: Option<ActionId>,
}

/// `base` must be tuned for [`BatchedBandit::blocks`] meta-rounds; see
/// [`batched_exp3p`] for the usual construction.
pub fn batched_bandit<P: BanditPolicy>(base: P, budget: usize, horizon: usize) -> Result<BatchedBandit<P>> {
    let (block, blocks) = block_layout(budget, horizon)?;
    Ok(BatchedBandit {
        base,
        block,
        blocks,
        horizon,
        round: 0,
        in_block: 0,
        sum: 0.0,
        current: None,
    })
}

fn block_layout(budget: usize, horizon: usize) -> Result<(usize, usize)> {
    if budget == 0 || budget > horizon {
        return Err(Error::param(
            "S",
            format!("must lie in 1..={horizon}, got {budget}"),
        ));
    }
    let block = horizon.div_ceil(budget);
    Ok((block, horizon.div_ceil(block)))
}

impl<P> BatchedBandit<P> {
    pub fn block_len(&self) -> usize {
        self.block
    }

    /// Number of blocks, which is also the base learner's horizon.
    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn base(&self) -> &P {
        &self.base
    }
}

impl<P: BanditPolicy> BanditPolicy for BatchedBandit<P> {
    fn reset(&mut self, seed: StreamSeed) {
        self.round = 0;
        self.in_block = 0;
        self.sum = 0.0;
        self.current = None;
        self.base.reset(seed);
    }

    fn choose(&mut self) -> Result<ActionId> {
        if self.round >= self.horizon {
            return Err(Error::Protocol(format!(
                "round {} is past the horizon {}",
                self.round + 1,
                self.horizon
            )));
        }
        match self.current {
            Some(a) => Ok(a),
            None => {
                let a = self.base.choose()?;
                self.current = Some(a);
                Ok(a)
            }
        }
    }

    fn observe(&mut self, loss: f64) -> Result<()> {
        if self.current.is_none() {
            return Err(Error::Protocol("observe called before choose".into()));
        }
        super::check_own_loss(loss)?;
        self.sum += loss;
        self.in_block += 1;
        self.round += 1;
        if self.in_block == self.block || self.round == self.horizon {
            self.base.observe(self.sum / self.in_block as f64)?;
            self.sum = 0.0;
            self.in_block = 0;
            self.current = None;
        }
        Ok(())
    }

    fn distribution(&self) -> Option<Vec<f64>> {
        self.base.distribution()
    }
}

/// Exp3.P with its default tuning on the block meta-game.
pub fn batched_exp3p(arms: usize, horizon: usize, budget: usize, delta: f64) -> Result<BatchedBandit<Exp3P>> {
    let (_, blocks) = block_layout(budget, horizon)?;
    let base = exp3p_policy(Exp3PParams::tuned(arms, blocks, delta)?)?;
    batched_bandit(base, budget, horizon)
}

/// Budget `clamp(ceil((T / c)^{2/3} n^{1/3}), 1, T)` used under switching cost `c`.
pub fn switching_cost_budget(horizon: usize, arms: usize, cost: f64) -> Result<usize> {
    if !(cost >= 1.0) {
        return Err(Error::param("c", format!("switching cost must be >= 1, got {cost}")));
    }
    let s = ((horizon as f64 / cost).powf(2.0 / 3.0) * (arms as f64).cbrt()).ceil();
    Ok((s as usize).clamp(1, horizon.max(1)))
}

pub fn exp3p_switching_cost(arms: usize, horizon: usize, cost: f64, delta: f64) -> Result<BatchedBandit<Exp3P>> {
    let budget = switching_cost_budget(horizon, arms, cost)?;
    batched_exp3p(arms, horizon, budget, delta)
}

/// Plays `policy` on `matrix` and scores it by regret plus `cost` per switch.
pub fn bandit_switching_cost_run<P: BanditPolicy + ?Sized>(
    policy: &mut P,
    matrix: &LossMatrix,
    cost: f64,
    seed: StreamSeed,
) -> Result<(f64, RunTrace)> {
    if !(cost >= 1.0) {
        return Err(Error::param("c", format!("switching cost must be >= 1, got {cost}")));
    }
    policy.reset(seed);
    let trace = run_bandit(policy, matrix)?;
    Ok((switching_cost_objective(&trace, matrix, cost)?, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::switches_of;
    use crate::seed::Role;

    #[test]
    fn switching_cost_budget_values() {
        let oracle = ((1e4f64).powf(2.0 / 3.0) * 2.0).ceil() as usize;
        assert_eq!(switching_cost_budget(10_000, 8, 1.0).unwrap(), oracle);
        assert_eq!(oracle, 929);
        assert!(switching_cost_budget(100, 8, 1e6).unwrap() <= 2);
        assert!(switching_cost_budget(100, 8, 0.5).is_err());
    }

    #[test]
    fn block_layout_examples() {
        assert_eq!(block_layout(3, 10).unwrap(), (4, 3));
        assert_eq!(block_layout(10, 10).unwrap(), (1, 10));
        assert_eq!(block_layout(1, 10).unwrap(), (10, 1));
        // ceil(1000/300) = 4, so only 250 blocks are used
        assert_eq!(block_layout(300, 1000).unwrap(), (4, 250));
        assert!(block_layout(0, 10).is_err());
        assert!(block_layout(11, 10).is_err());
    }

    fn matrix() -> LossMatrix {
        let rows: Vec<Vec<f64>> = (0..97)
            .map(|t| vec![((t * 5) % 7) as f64 / 6.0, ((t * 3) % 4) as f64 / 3.0, 0.5])
            .collect();
        LossMatrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn never_exceeds_budget_minus_one() {
        let m = matrix();
        for s in 1..=20 {
            let mut p = batched_exp3p(3, 97, s, 0.1).unwrap();
            p.reset(StreamSeed::derive(5, s as u64, Role::Algorithm));
            let tr = run_bandit(&mut p, &m).unwrap();
            assert!(switches_of(&tr) < s);
        }
    }

    #[test]
    fn full_budget_matches_base() {
        let m = matrix();
        let seed = StreamSeed::derive(5, 99, Role::Algorithm);
        let params = Exp3PParams::tuned(3, 97, 0.1).unwrap();
        let mut plain = exp3p_policy(params).unwrap();
        plain.reset(seed);
        let a = run_bandit(&mut plain, &m).unwrap();
        let mut batched = batched_bandit(exp3p_policy(params).unwrap(), 97, 97).unwrap();
        batched.reset(seed);
        let b = run_bandit(&mut batched, &m).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn objective_adds_switch_cost() {
        let m = matrix();
        let mut p = batched_exp3p(3, 97, 5, 0.1).unwrap();
        let (obj, tr) = bandit_switching_cost_run(&mut p, &m, 2.0, StreamSeed::new(3, 3)).unwrap();
        let regret = crate::game::regret_of(&tr, &m).unwrap();
        assert!((obj - regret - 2.0 * switches_of(&tr) as f64).abs() < 1e-12);
    }
}
