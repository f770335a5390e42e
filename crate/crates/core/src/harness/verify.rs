//! Monte Carlo and exact checks of the concentration facts the learners rely
//! on, plus the pointwise perturbed-leader checks on simulated runs.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;
use statrs::function::gamma::ln_gamma;

use crate::adversaries::{alternating_two_action, iid_bernoulli, mrw_adversary};
use crate::batching::{bmfpl, bpr, framework_restart};
use crate::combinatorial::{bcpr, cpr_policy, DecisionSet};
use crate::error::{Error, Result};
use crate::experts::{fpl_policy, mfpl_policy, Fpl, pr_policy, ExpertOracle, LinearOracle, OnlinePolicy, PerturbationSchedule};
use crate::game::LossMatrix;
use crate::seed::{Role, SeedSpec, StreamSeed};
use crate::util::standard_exponential;

use super::checks::{check_btl, check_fpl_inequality, FplCheck};
use super::montecarlo::replicate;
use super::play::{run_full_info, run_linear};
use super::stats::{frequency_se, mean_and_se};

/// One line of a verification report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub label: String,
    pub estimate: f64,
    pub bound: f64,
    pub se: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub name: String,
    pub checks: Vec<CheckOutcome>,
    /// Informational flags that do not affect the verdict.
    pub notes: Vec<String>,
}

impl VerifyReport {
    fn new(name: impl Into<String>) -> Self {
        VerifyReport {
            name: name.into(),
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn push(&mut self, label: impl Into<String>, estimate: f64, bound: f64, se: f64, pass: bool) {
        self.checks.push(CheckOutcome {
            label: label.into(),
            estimate,
            bound,
            se,
            pass,
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {}: {} estimate={:.6} bound={:.6} se={:.3e}",
                if c.pass { "PASS" } else { "FAIL" },
                self.name,
                c.label,
                c.estimate,
                c.bound,
                c.se
            )?;
        }
        for n in &self.notes {
            writeln!(f, "note {}: {n}", self.name)?;
        }
        Ok(())
    }
}

const CHUNK: u64 = 10_000;

/// Runs `reps` draws of `draw` in fixed-size chunks, each on its own
/// sub-stream, and returns the per-draw values in order.
fn chunked<F>(reps: u64, seed: StreamSeed, jobs: Option<usize>, draw: F) -> Result<Vec<f64>>
where
    F: Fn(&mut crate::seed::StreamRng) -> f64 + Sync + Send,
{
    let chunks = reps.div_ceil(CHUNK);
    let parts = replicate(chunks, jobs, |c| {
        let mut rng = seed.child(c).rng();
        let len = CHUNK.min(reps - c * CHUNK);
        Ok((0..len).map(|_| draw(&mut rng)).collect::<Vec<f64>>())
    })?;
    Ok(parts.into_iter().flatten().collect())
}

fn max_exponential<R: Rng + ?Sized>(rng: &mut R, n: usize) -> f64 {
    (0..n).map(|_| standard_exponential(rng)).fold(f64::NEG_INFINITY, f64::max)
}

/// `H_n = sum_{i <= n} 1/i`, the mean of the largest of `n` unit exponentials.
pub fn harmonic(n: usize) -> f64 {
    (1..=n).rev().map(|i| 1.0 / i as f64).sum()
}

/// Frequency of `sum_{e <= N} max_i Exp(1) > 6 N ln n` against `e^{-N}`, and
/// the mean of one maximum against the harmonic number.
pub fn verify_pev(epochs: usize, n: usize, reps: u64, seed: u64, jobs: Option<usize>) -> Result<VerifyReport> {
    if epochs < 2 || n < 2 {
        return Err(Error::config("N", "verify_pev needs N >= 2 and n >= 2"));
    }
    if reps == 0 {
        return Err(Error::config("reps", "must be >= 1"));
    }
    let stream = SeedSpec::new(seed).stream(0, Role::Verification);
    let threshold = 6.0 * epochs as f64 * (n as f64).ln();
    let sums = chunked(reps, stream, jobs, |rng| (0..epochs).map(|_| max_exponential(rng, n)).sum())?;
    let freq = sums.iter().filter(|&&s| s > threshold).count() as f64 / reps as f64;
    let se = frequency_se(freq, reps as usize);
    let bound = (-(epochs as f64)).exp();
    let mut report = VerifyReport::new("pev");
    report.push(
        format!("P(sum of {epochs} maxima of {n} > {threshold:.4}) <= e^-N"),
        freq,
        bound,
        se,
        freq <= bound + 3.0 * se,
    );
    let maxima = chunked(reps, stream.child(u64::MAX), jobs, |rng| max_exponential(rng, n))?;
    let (mean, se) = mean_and_se(&maxima);
    let h = harmonic(n);
    report.push(
        format!("E[max of {n}] = H_{n}"),
        mean,
        h,
        se,
        (mean - h).abs() <= 3.0 * se,
    );
    Ok(report)
}

/// `E[e^{tX}]` for `X` the largest of `n` unit exponentials, from
/// `n! Gamma(1 - t) / Gamma(n + 1 - t)`.
pub fn max_exponential_mgf(t: f64, n: usize) -> f64 {
    let n = n as f64;
    (ln_gamma(n + 1.0) + ln_gamma(1.0 - t) - ln_gamma(n + 1.0 - t)).exp()
}

pub fn mgf_bound(t: f64, n: usize) -> f64 {
    (n as f64).powf(t) / (1.0 - t)
}

/// Monte Carlo `E[e^{tX}]` against `n^t / (1 - t)`.
pub fn verify_mgf(t: f64, n: usize, reps: u64, seed: u64, jobs: Option<usize>) -> Result<VerifyReport> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::config("t", format!("must lie in (0, 1), got {t}")));
    }
    if n < 1 || reps == 0 {
        return Err(Error::config("n", "verify_mgf needs n >= 1 and reps >= 1"));
    }
    let stream = SeedSpec::new(seed).stream(1, Role::Verification).child(n as u64);
    let draws = chunked(reps, stream, jobs, |rng| (t * max_exponential(rng, n)).exp())?;
    let (mean, se) = mean_and_se(&draws);
    let bound = mgf_bound(t, n);
    let exact = max_exponential_mgf(t, n);
    let mut report = VerifyReport::new("mgf");
    report.push(
        format!("E[exp(t X)] <= n^t/(1-t), t={t}, n={n}"),
        mean,
        bound,
        se,
        mean <= bound + 3.0 * se,
    );
    report.push(format!("closed form <= n^t/(1-t), t={t}, n={n}"), exact, bound, 0.0, exact <= bound);
    Ok(report)
}

/// `P(Bin(T, 1/2) >= k)` by summing the exact mass in log space.
pub fn binomial_upper_tail(trials: u64, k: u64) -> f64 {
    if k > trials {
        return 0.0;
    }
    let ln2 = std::f64::consts::LN_2;
    let logs: Vec<f64> = (k..=trials).map(|j| ln_binomial(trials, j) - trials as f64 * ln2).collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    top.exp() * logs.iter().map(|l| (l - top).exp()).sum::<f64>()
}

/// Exact `P(Bin(T, 1/2) >= T/2 + r sqrt(T))` against `[e^{-5r^2}, e^{-2r^2}]`.
///
/// Accepts `0 < r <= sqrt(T)/4` with `r sqrt(T)` an integer; a note flags
/// whether `r >= ln T / 2`, where the lower bound is proved.
pub fn verify_binomial(trials: u64, r: f64) -> Result<VerifyReport> {
    if trials < 4 {
        return Err(Error::config("T", "needs T >= 4"));
    }
    let root = (trials as f64).sqrt();
    if !(r > 0.0 && r <= root / 4.0 + 1e-12) {
        return Err(Error::config("r", format!("must lie in (0, sqrt(T)/4] = (0, {:.4}], got {r}", root / 4.0)));
    }
    let shift = r * root;
    if (shift - shift.round()).abs() > 1e-9 {
        return Err(Error::config("r", format!("r sqrt(T) = {shift} is not an integer")));
    }
    // T/2 + r sqrt(T) may be a half-integer; the tail starts at its ceiling
    let k = (trials as f64 / 2.0 + shift.round()).ceil() as u64;
    let tail = binomial_upper_tail(trials, k);
    let (lo, hi) = ((-5.0 * r * r).exp(), (-2.0 * r * r).exp());
    let mut report = VerifyReport::new("binomial");
    report.push(format!("tail T={trials} r={r} >= e^(-5r^2)"), tail, lo, 0.0, tail >= lo);
    report.push(format!("tail T={trials} r={r} <= e^(-2r^2)"), tail, hi, 0.0, tail <= hi);
    let asymptotic = r >= (trials as f64).ln() / 2.0;
    report.notes.push(format!("asymptotic_regime={asymptotic}"));
    Ok(report)
}

pub const FPL_ALGORITHMS: [&str; 6] = ["mfpl", "pr", "bmfpl", "bpr", "cpr", "bcpr"];
pub const FPL_ADVERSARIES: [&str; 3] = ["iid_bernoulli", "alternating", "mrw"];

/// Shape of the runs in the perturbed-leader suite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FplSuite {
    pub horizon: usize,
    /// Actions, or coordinates for the combinatorial learners; the
    /// alternating adversary always uses two.
    pub actions: usize,
    /// Per-epoch quota of the restarting learners, small so that runs span
    /// several epochs.
    pub quota: usize,
}

impl Default for FplSuite {
    fn default() -> Self {
        FplSuite {
            horizon: 200,
            actions: 8,
            quota: 4,
        }
    }
}

fn record_check<O, P>(policy: &mut P, oracle: &O, matrix: &LossMatrix, seed: StreamSeed) -> Result<FplCheck>
where
    O: LinearOracle,
    P: OnlinePolicy<Action = O::Action>,
{
    policy.reset(seed);
    let trace = run_linear(policy, oracle, matrix)?;
    check_fpl_inequality(oracle, &trace, matrix, policy.fpl_record().as_ref())
}

/// Plays one perturbed-leader learner on one adversary and checks the
/// pointwise inequality. For the combinatorial learners the loss range must
/// also stay within `m`.
pub fn fpl_case(
    algorithm: &str,
    adversary: &str,
    suite: FplSuite,
    alg_seed: StreamSeed,
    adv_seed: StreamSeed,
) -> Result<(FplCheck, bool)> {
    let t = suite.horizon;
    let n = if adversary == "alternating" { 2 } else { suite.actions };
    let matrix = match adversary {
        "iid_bernoulli" => iid_bernoulli(t, n, adv_seed)?,
        "alternating" => alternating_two_action(t, n)?,
        "mrw" => mrw_adversary(t, n, (t / 10).max(1), adv_seed)?,
        other => return Err(Error::config("adversary", format!("`{other}` is not in the suite"))),
    };
    let experts = ExpertOracle { n };
    let epsilon = ((n as f64).ln() / t as f64).sqrt();
    let m = (n / 3).max(1);
    let set = DecisionSet::top_m(n, m)?;
    let check = match algorithm {
        "mfpl" => record_check(&mut mfpl_policy(n, epsilon)?, &experts, &matrix, alg_seed)?,
        "pr" => record_check(&mut pr_policy(n)?, &experts, &matrix, alg_seed)?,
        "bmfpl" => record_check(&mut bmfpl(t, n, 0.1, Some(suite.quota))?, &experts, &matrix, alg_seed)?,
        "bpr" => record_check(&mut bpr(t, n, 0.1, Some(suite.quota))?, &experts, &matrix, alg_seed)?,
        "cpr" => record_check(&mut cpr_policy(set.clone(), None)?, &set, &matrix, alg_seed)?,
        "bcpr" => record_check(
            &mut bcpr(set.clone(), t, 0.1, 1.0, None, Some(suite.quota))?,
            &set,
            &matrix,
            alg_seed,
        )?,
        other => return Err(Error::config("algorithm", format!("`{other}` is not in the suite"))),
    };
    let range_ok = !algorithm.ends_with("cpr") || check.loss_range <= m as f64;
    Ok((check, range_ok))
}

/// `runs` runs spread evenly over every learner and adversary of the suite.
pub fn verify_fpl(runs: u64, suite: FplSuite, seed: u64, jobs: Option<usize>) -> Result<VerifyReport> {
    let cases: Vec<(&str, &str)> = FPL_ALGORITHMS
        .iter()
        .flat_map(|a| FPL_ADVERSARIES.iter().map(move |d| (*a, *d)))
        .collect();
    let seeds = SeedSpec::new(seed);
    let outcomes = replicate(runs, jobs, |r| {
        let (alg, adv) = cases[(r as usize) % cases.len()];
        fpl_case(alg, adv, suite, seeds.stream(r, Role::Algorithm), seeds.stream(r, Role::Adversary))
    })?;
    let mut report = VerifyReport::new("fpl");
    for (k, (alg, adv)) in cases.iter().enumerate() {
        let mine: Vec<&(FplCheck, bool)> = outcomes.iter().skip(k).step_by(cases.len()).collect();
        if mine.is_empty() {
            continue;
        }
        let held = mine.iter().filter(|(c, range_ok)| c.holds && *range_ok).count();
        let worst = mine
            .iter()
            .map(|(c, _)| c.regret - c.bound)
            .fold(f64::NEG_INFINITY, f64::max);
        report.push(
            format!("{alg} vs {adv}: {held}/{} runs hold, worst regret-bound {worst:.3e}", mine.len()),
            held as f64 / mine.len() as f64,
            1.0,
            0.0,
            held == mine.len(),
        );
    }
    Ok(report)
}

/// Random dyadic instance for the be-the-leader check: losses in quarters
/// and perturbations in eighths keep every sum exact.
fn btl_instance(r: u64, seed: StreamSeed) -> Result<bool> {
    let mut rng = seed.child(r).rng();
    let combinatorial = r % 4 == 3;
    let dim = if combinatorial { rng.random_range(2..=10) } else { rng.random_range(2..=16) };
    let horizon = rng.random_range(1..=200);
    let rows: Vec<Vec<f64>> = (0..horizon)
        .map(|_| (0..dim).map(|_| f64::from(rng.random_range(0..=4u8)) / 4.0).collect())
        .collect();
    let matrix = LossMatrix::from_rows(&rows)?;
    let noise: Vec<Vec<f64>> = (0..=horizon)
        .map(|_| (0..dim).map(|_| f64::from(rng.random_range(-16..=16i8)) / 8.0).collect())
        .collect();
    let schedule = PerturbationSchedule::Injected(noise);
    let quota = if rng.random_bool(0.5) { Some(rng.random_range(1..=6)) } else { None };
    let run_seed = seed.child(r).child(1);
    if combinatorial {
        let set = DecisionSet::top_m(dim, rng.random_range(1..=dim))?;
        let mut base = Fpl::new(set.clone(), schedule)?;
        match quota {
            Some(q) => btl_holds(&mut framework_restart(base, q)?, &set, &matrix, run_seed),
            None => btl_holds(&mut base, &set, &matrix, run_seed),
        }
    } else {
        let oracle = ExpertOracle { n: dim };
        let mut base = fpl_policy(dim, schedule)?;
        match quota {
            Some(q) => btl_holds(&mut framework_restart(base, q)?, &oracle, &matrix, run_seed),
            None => btl_holds(&mut base, &oracle, &matrix, run_seed),
        }
    }
}

fn btl_holds<O, P>(policy: &mut P, oracle: &O, matrix: &LossMatrix, seed: StreamSeed) -> Result<bool>
where
    O: LinearOracle,
    P: OnlinePolicy<Action = O::Action>,
{
    policy.reset(seed);
    let trace = run_linear(policy, oracle, matrix)?;
    let record = policy.fpl_record().ok_or_else(|| Error::MissingSchedule("no perturbation record".into()))?;
    Ok(check_btl(oracle, &trace, matrix, &record, 0.0)?.holds)
}

/// Exact be-the-leader check on `instances` random dyadic instances with
/// `n <= 16` experts or `d <= 10` coordinates and `T <= 200`.
pub fn verify_btl(instances: u64, seed: u64, jobs: Option<usize>) -> Result<VerifyReport> {
    let stream = SeedSpec::new(seed).stream(2, Role::Verification);
    let held = replicate(instances, jobs, |r| btl_instance(r, stream))?;
    let ok = held.iter().filter(|&&h| h).count();
    let mut report = VerifyReport::new("btl");
    report.push(
        format!("leader sequence beats every comparator on {ok}/{instances} instances"),
        ok as f64 / instances.max(1) as f64,
        1.0,
        0.0,
        ok as u64 == instances,
    );
    Ok(report)
}

/// Resets an experts learner, plays it on `matrix` and checks the pointwise
/// inequality.
pub fn fpl_run_check<P>(policy: &mut P, matrix: &LossMatrix, seed: StreamSeed) -> Result<FplCheck>
where
    P: OnlinePolicy<Action = crate::game::ActionId>,
{
    policy.reset(seed);
    let trace = run_full_info(policy, matrix)?;
    check_fpl_inequality(&ExpertOracle { n: matrix.actions() }, &trace, matrix, policy.fpl_record().as_ref())
}
