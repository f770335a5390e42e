//! Algorithm and adversary ids accepted by experiment configs.

use std::collections::BTreeSet;

use crate::adversaries::{
    AdaptiveAdversary,
    alternating_two_action, batched_bernoulli, default_batched_epochs, follow_punisher, gap_bernoulli,
    iid_bernoulli, mrw_adversary, sd_tail_adversary, FollowPunisher,
};
use crate::bandit::{
    batched_bandit, batched_exp3p, exp3p_policy, exp3p_switching_cost, BanditPolicy, BoxedBandit, Exp3PParams,
    UniformBandit,
};
use crate::batching::{bmfpl, bpr, framework_restart, pfe_budget, pfe_budget_high, pfe_budget_low, BudgetBase};
use crate::combinatorial::{bcpr, comb_regret, cpr_policy, DecisionSet, Vertex};
use crate::config::GameConfig;
use crate::error::{Error, Result};
use crate::experts::{ftl_policy, lagged_wrapper, mfpl_policy, pr_policy, sd_policy, BoxedPolicy, OnlinePolicy};
use crate::game::{regret_of, switches_of, ActionId, LossMatrix, RunTrace};
use crate::seed::{Role, SeedSpec, StreamSeed};

use super::play::{run_adaptive, run_bandit, run_full_info, run_linear};
use super::stats::{ReplicationRow, DEFAULT_QUANTILES};

/// What the learner sees each round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feedback {
    Full,
    Bandit,
    /// Full information over an `m`-sparse decision set in `{0,1}^n`.
    Combinatorial,
}

/// A registered id with its parameter keys.
#[derive(Debug, Clone, Copy)]
pub struct Entry {
    pub id: &'static str,
    pub required: &'static [&'static str],
    pub optional: &'static [&'static str],
    pub about: &'static str,
}

const fn entry(
    id: &'static str,
    required: &'static [&'static str],
    optional: &'static [&'static str],
    about: &'static str,
) -> Entry {
    Entry { id, required, optional, about }
}

pub const ALGORITHMS: &[Entry] = &[
    entry("ftl", &[], &[], "follow the leader"),
    entry("mfpl", &["epsilon"], &[], "perturbed leader with one exponential perturbation"),
    entry("pr", &[], &[], "perturbed leader with fresh +-1/2 perturbations each round"),
    entry("sd", &["eta"], &[], "shrinking dartboard"),
    entry(
        "lagged_mfpl",
        &["epsilon", "p", "bad_rounds"],
        &["quota"],
        "MFPL that with probability p first plays a reserved losing action; restarts when quota is set",
    ),
    entry("bmfpl", &["delta"], &["quota"], "batched restarts of MFPL"),
    entry("bpr", &["delta"], &["quota"], "batched restarts of PR"),
    entry("pfe_budget_high", &["S", "delta"], &["kappa", "base"], "high-switching budget learner"),
    entry("pfe_budget_low", &["S", "delta"], &["base"], "low-switching budget learner"),
    entry("pfe_budget", &["S", "delta"], &["kappa", "base"], "budget learner, regime picked from S"),
    entry("exp3p", &["delta"], &["eta_b", "gamma", "beta"], "Exp3.P bandit"),
    entry("batched_exp3p", &["S", "delta"], &["eta_b", "gamma", "beta"], "Exp3.P on S blocks"),
    entry("exp3p_switching_cost", &["c", "delta"], &[], "batched Exp3.P tuned for switching cost c"),
    entry("uniform_bandit", &[], &[], "uniformly random arm every round"),
    entry("cpr", &["m"], &["eta"], "Gaussian perturbed leader over top-m vertices of {0,1}^n"),
    entry(
        "bcpr",
        &["m", "delta"],
        &["eta", "switch_const", "quota"],
        "batched restarts of the Gaussian perturbed leader",
    ),
];

pub const ADVERSARIES: &[Entry] = &[
    entry("iid_bernoulli", &[], &[], "fair-coin losses"),
    entry("batched_bernoulli", &[], &["E"], "fair coins constant over E blocks (default from S)"),
    entry("alternating", &[], &[], "two-action losses alternating after a half-loss round"),
    entry("sd_tail", &["eta", "delta"], &[], "one random arm loses 1 for the first T' rounds"),
    entry("follow_punisher", &[], &[], "adaptive: loss 1 on the learner's previous action"),
    entry("mrw", &["S"], &[], "multi-scale random walk with a hidden better arm"),
    entry("gap_bernoulli", &["eps_gap"], &[], "fair coins except one arm with mean 1/2 - eps_gap"),
];

/// Keys read by the harness rather than by a learner or adversary.
pub const HARNESS_KEYS: &[&str] = &["tail_thresholds", "quantiles"];

const TYPED_KEYS: &[&str] = &["S", "c", "delta"];

pub fn algorithm_entry(id: &str) -> Result<&'static Entry> {
    ALGORITHMS
        .iter()
        .find(|e| e.id == id)
        .ok_or_else(|| Error::config("algorithm", format!("unknown id `{id}`")))
}

pub fn adversary_entry(id: &str) -> Result<&'static Entry> {
    ADVERSARIES
        .iter()
        .find(|e| e.id == id)
        .ok_or_else(|| Error::config("adversary", format!("unknown id `{id}`")))
}

pub fn feedback_of(algorithm: &str) -> Feedback {
    match algorithm {
        "exp3p" | "batched_exp3p" | "exp3p_switching_cost" | "uniform_bandit" => Feedback::Bandit,
        "cpr" | "bcpr" => Feedback::Combinatorial,
        _ => Feedback::Full,
    }
}

fn has_key(cfg: &GameConfig, key: &str) -> bool {
    match key {
        "S" => cfg.budget.is_some(),
        "c" => cfg.c.is_some(),
        "delta" => cfg.delta.is_some(),
        _ => cfg.params.contains_key(key),
    }
}

/// A constructed learner.
pub enum Player {
    /// `reserved_action` widens the matrix by one always-worst column.
    Full { policy: BoxedPolicy, reserved_action: bool },
    Bandit(BoxedBandit),
    Comb {
        policy: Box<dyn OnlinePolicy<Action = Vertex>>,
        set: DecisionSet,
    },
}

/// Losses for one replication.
pub enum Environment {
    Oblivious(LossMatrix),
    Adaptive(FollowPunisher),
}

/// Result of playing one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub regret: f64,
    pub switches: usize,
    pub epochs: u32,
}

/// A validated config, ready to build fresh players and environments.
#[derive(Debug, Clone)]
pub struct Experiment {
    config: GameConfig,
    quantiles: Vec<f64>,
    tail_thresholds: Vec<f64>,
}

impl Experiment {
    /// Validates ids and keys and builds one player and environment so that
    /// parameter errors surface before any replication runs.
    pub fn new(config: GameConfig) -> Result<Self> {
        config.validate()?;
        let alg = algorithm_entry(&config.algorithm)?;
        let adv = adversary_entry(&config.adversary)?;
        for key in alg.required.iter().chain(adv.required) {
            if !has_key(&config, key) {
                return Err(Error::config(*key, "missing required key"));
            }
        }
        if config.adversary == "batched_bernoulli" && !has_key(&config, "E") && config.budget.is_none() {
            return Err(Error::config("E", "batched_bernoulli needs E, or S to derive it"));
        }
        let known: BTreeSet<&str> = alg
            .required
            .iter()
            .chain(alg.optional)
            .chain(adv.required)
            .chain(adv.optional)
            .chain(HARNESS_KEYS)
            .copied()
            .collect();
        for key in config.params.keys() {
            if !known.contains(key.as_str()) {
                return Err(Error::config(
                    key.clone(),
                    format!("not a parameter of `{}` or `{}`", config.algorithm, config.adversary),
                ));
            }
        }
        let quantiles = if config.params.contains_key("quantiles") {
            config.list("quantiles")?
        } else {
            DEFAULT_QUANTILES.to_vec()
        };
        if let Some(p) = quantiles.iter().find(|p| !(**p > 0.0 && **p <= 1.0)) {
            return Err(Error::config("quantiles", format!("level {p} outside (0, 1]")));
        }
        let tail_thresholds = config.list("tail_thresholds")?;
        let exp = Experiment { config, quantiles, tail_thresholds };
        let seeds = SeedSpec::new(exp.config.seed);
        let player = exp.player().map_err(as_config_error)?;
        let env = exp.environment(seeds.stream(0, Role::Adversary)).map_err(as_config_error)?;
        check_pairing(&player, &env, &exp.config)?;
        Ok(exp)
    }

    pub fn config(&self) -> &GameConfig {
        &self.config
    }

    pub fn quantiles(&self) -> &[f64] {
        &self.quantiles
    }

    pub fn tail_thresholds(&self) -> &[f64] {
        &self.tail_thresholds
    }

    pub fn feedback(&self) -> Feedback {
        feedback_of(&self.config.algorithm)
    }

    /// A fresh, unseeded learner.
    pub fn player(&self) -> Result<Player> {
        build_player(&self.config)
    }

    /// Losses for one replication drawn from `seed`.
    pub fn environment(&self, seed: StreamSeed) -> Result<Environment> {
        build_environment(&self.config, seed)
    }

    /// Plays replication `r` on its derived streams.
    pub fn run_replication(&self, r: u64) -> Result<ReplicationRow> {
        let seeds = SeedSpec::new(self.config.seed);
        let out = play(
            self.player()?,
            self.environment(seeds.stream(r, Role::Adversary))?,
            seeds.stream(r, Role::Algorithm),
            self.config.horizon,
        )?;
        Ok(ReplicationRow {
            run_id: r,
            seed: seeds.replication_seed(r),
            regret: out.regret,
            switches: out.switches,
            epochs: out.epochs,
        })
    }
}

fn as_config_error(e: Error) -> Error {
    match e {
        Error::InvalidParameter { name, reason } => Error::Config { key: name, reason },
        other => other,
    }
}

fn check_pairing(player: &Player, env: &Environment, cfg: &GameConfig) -> Result<()> {
    match (player, env) {
        (Player::Full { reserved_action: false, .. }, Environment::Adaptive(_)) => Ok(()),
        (_, Environment::Adaptive(_)) => Err(Error::config(
            "adversary",
            format!("`{}` is adaptive and only plays plain full-information learners", cfg.adversary),
        )),
        _ => Ok(()),
    }
}

fn base_kind(cfg: &GameConfig) -> Result<BudgetBase> {
    Ok(cfg.param::<BudgetBase>("base")?.unwrap_or_default())
}

fn exp3p_overrides(cfg: &GameConfig, mut params: Exp3PParams) -> Result<Exp3PParams> {
    if let Some(eta) = cfg.param("eta_b")? {
        params.eta = eta;
    }
    if let Some(gamma) = cfg.param("gamma")? {
        params.gamma = gamma;
    }
    if let Some(beta) = cfg.param("beta")? {
        params.beta = beta;
    }
    params.validate()?;
    Ok(params)
}

fn full(policy: BoxedPolicy) -> Player {
    Player::Full { policy, reserved_action: false }
}

pub fn build_player(cfg: &GameConfig) -> Result<Player> {
    let (t, n) = (cfg.horizon, cfg.actions);
    let player = match cfg.algorithm.as_str() {
        "ftl" => full(Box::new(ftl_policy(n)?)),
        "mfpl" => full(Box::new(mfpl_policy(n, cfg.require("epsilon")?)?)),
        "pr" => full(Box::new(pr_policy(n)?)),
        "sd" => full(Box::new(sd_policy(n, cfg.require("eta")?)?)),
        "lagged_mfpl" => {
            let base = mfpl_policy(n, cfg.require("epsilon")?)?;
            let (p, bad_rounds) = (cfg.require("p")?, cfg.require("bad_rounds")?);
            let wrapped = lagged_wrapper(base, n, ActionId::new(n), p, bad_rounds, t)?;
            let policy: BoxedPolicy = match cfg.param::<usize>("quota")? {
                Some(q) => Box::new(framework_restart(wrapped, q)?),
                None => Box::new(wrapped),
            };
            Player::Full { policy, reserved_action: true }
        }
        "bmfpl" => full(Box::new(bmfpl(t, n, cfg.require_delta()?, cfg.param("quota")?)?)),
        "bpr" => full(Box::new(bpr(t, n, cfg.require_delta()?, cfg.param("quota")?)?)),
        "pfe_budget_high" => full(Box::new(pfe_budget_high(
            t,
            n,
            cfg.require_budget()?,
            cfg.require_delta()?,
            cfg.param("kappa")?.unwrap_or(1.0),
            base_kind(cfg)?,
        )?)),
        "pfe_budget_low" => full(pfe_budget_low(
            t,
            n,
            cfg.require_budget()?,
            cfg.require_delta()?,
            base_kind(cfg)?,
        )?),
        "pfe_budget" => full(pfe_budget(
            t,
            n,
            cfg.require_budget()?,
            cfg.require_delta()?,
            cfg.param("kappa")?.unwrap_or(1.0),
            base_kind(cfg)?,
        )?),
        "exp3p" => {
            let params = exp3p_overrides(cfg, Exp3PParams::tuned(n, t, cfg.require_delta()?)?)?;
            Player::Bandit(Box::new(exp3p_policy(params)?))
        }
        "batched_exp3p" => {
            let s = cfg.require_budget()?;
            let default = batched_exp3p(n, t, s, cfg.require_delta()?)?;
            let params = exp3p_overrides(cfg, default.base().params().clone())?;
            Player::Bandit(Box::new(batched_bandit(exp3p_policy(params)?, s, t)?))
        }
        "exp3p_switching_cost" => Player::Bandit(Box::new(exp3p_switching_cost(
            n,
            t,
            cfg.require_cost()?,
            cfg.require_delta()?,
        )?)),
        "uniform_bandit" => Player::Bandit(Box::new(UniformBandit::new(n)?)),
        "cpr" => {
            let set = DecisionSet::top_m(n, cfg.require("m")?)?;
            Player::Comb {
                policy: Box::new(cpr_policy(set.clone(), cfg.param("eta")?)?),
                set,
            }
        }
        "bcpr" => {
            let set = DecisionSet::top_m(n, cfg.require("m")?)?;
            let policy = bcpr(
                set.clone(),
                t,
                cfg.require_delta()?,
                cfg.param("switch_const")?.unwrap_or(1.0),
                cfg.param("eta")?,
                cfg.param("quota")?,
            )?;
            Player::Comb { policy: Box::new(policy), set }
        }
        other => return Err(Error::config("algorithm", format!("unknown id `{other}`"))),
    };
    Ok(player)
}

pub fn build_environment(cfg: &GameConfig, seed: StreamSeed) -> Result<Environment> {
    let (t, n) = (cfg.horizon, cfg.actions);
    let m = match cfg.adversary.as_str() {
        "iid_bernoulli" => iid_bernoulli(t, n, seed)?,
        "batched_bernoulli" => {
            let epochs = match cfg.param("E")? {
                Some(e) => e,
                None => default_batched_epochs(t, n, cfg.require_budget()?)?,
            };
            batched_bernoulli(t, n, epochs, seed)?
        }
        "alternating" => alternating_two_action(t, n)?,
        "sd_tail" => sd_tail_adversary(t, n, cfg.require("eta")?, cfg.require_delta()?, seed)?.0,
        "follow_punisher" => return Ok(Environment::Adaptive(follow_punisher(n)?)),
        "mrw" => mrw_adversary(t, n, cfg.require_budget()?, seed)?,
        "gap_bernoulli" => gap_bernoulli(t, n, cfg.require("eps_gap")?, seed)?,
        other => return Err(Error::config("adversary", format!("unknown id `{other}`"))),
    };
    Ok(Environment::Oblivious(m))
}

fn epochs_of<A: PartialEq>(trace: &RunTrace<A>) -> u32 {
    trace.epochs().max(1)
}

/// Resets the player on `seed` and plays it against `env`.
pub fn play(player: Player, env: Environment, seed: StreamSeed, horizon: usize) -> Result<Outcome> {
    match (player, env) {
        (Player::Full { mut policy, reserved_action }, Environment::Oblivious(m)) => {
            let m = if reserved_action { m.with_reserved_worst_action() } else { m };
            policy.reset(seed);
            policy.set_recording(false);
            let tr = run_full_info(&mut policy, &m)?;
            Ok(Outcome { regret: regret_of(&tr, &m)?, switches: switches_of(&tr), epochs: epochs_of(&tr) })
        }
        (Player::Full { mut policy, .. }, Environment::Adaptive(mut adv)) => {
            policy.reset(seed);
            policy.set_recording(false);
            adv.reset(seed.child(0));
            let (tr, m) = run_adaptive(&mut policy, &mut adv, horizon)?;
            Ok(Outcome { regret: regret_of(&tr, &m)?, switches: switches_of(&tr), epochs: epochs_of(&tr) })
        }
        (Player::Bandit(mut policy), Environment::Oblivious(m)) => {
            policy.reset(seed);
            let tr = run_bandit(&mut policy, &m)?;
            Ok(Outcome { regret: regret_of(&tr, &m)?, switches: switches_of(&tr), epochs: 1 })
        }
        (Player::Comb { mut policy, set }, Environment::Oblivious(m)) => {
            policy.reset(seed);
            policy.set_recording(false);
            let tr = run_linear(&mut policy, &set, &m)?;
            Ok(Outcome {
                regret: comb_regret(&tr, &set, &m)?,
                switches: switches_of(&tr),
                epochs: epochs_of(&tr),
            })
        }
        (_, Environment::Adaptive(_)) => Err(Error::config(
            "adversary",
            "adaptive adversaries only play plain full-information learners",
        )),
    }
}

/// Human-readable listing of every id and its keys.
pub fn listing() -> String {
    let mut out = String::from("algorithms:\n");
    let line = |e: &Entry| {
        let mut s = format!("  {:<22} {}", e.id, e.about);
        if !e.required.is_empty() {
            s.push_str(&format!("\n  {:<22} required: {}", "", e.required.join(", ")));
        }
        if !e.optional.is_empty() {
            s.push_str(&format!("\n  {:<22} optional: {}", "", e.optional.join(", ")));
        }
        s.push('\n');
        s
    };
    for e in ALGORITHMS {
        out.push_str(&line(e));
    }
    out.push_str("adversaries:\n");
    for e in ADVERSARIES {
        out.push_str(&line(e));
    }
    out.push_str(&format!("harness keys: {}\n", HARNESS_KEYS.join(", ")));
    out.push_str(&format!("typed keys: T, n, replications, seed, {}\n", TYPED_KEYS.join(", ")));
    out
}
