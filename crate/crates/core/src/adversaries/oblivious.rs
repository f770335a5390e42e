use rand::Rng;

use crate::error::{Error, Result};
use crate::game::{ActionId, LossMatrix};
use crate::seed::StreamSeed;
use crate::util::{ceil_tol, fill_fair_bits};

fn check_shape(horizon: usize, n: usize) -> Result<()> {
    if horizon == 0 {
        return Err(Error::param("T", "horizon must be >= 1"));
    }
    if n == 0 {
        return Err(Error::param("n", "needs at least one action"));
    }
    Ok(())
}

/// Every entry an independent fair coin in `{0, 1}`.
pub fn iid_bernoulli(horizon: usize, n: usize, seed: StreamSeed) -> Result<LossMatrix> {
    check_shape(horizon, n)?;
    let mut rng = seed.rng();
    let mut entries = vec![0.0; horizon * n];
    fill_fair_bits(&mut rng, &mut entries);
    LossMatrix::new(horizon, n, entries)
}

/// `E` epochs of `ceil(T / E)` rounds (the last may be shorter); each action
/// draws one fair coin per epoch and repeats it across the epoch.
pub fn batched_bernoulli(horizon: usize, n: usize, epochs: usize, seed: StreamSeed) -> Result<LossMatrix> {
    check_shape(horizon, n)?;
    if epochs == 0 || epochs > horizon {
        return Err(Error::param("E", format!("must lie in 1..={horizon}, got {epochs}")));
    }
    let block = horizon.div_ceil(epochs);
    let mut rng = seed.rng();
    let mut entries = Vec::with_capacity(horizon * n);
    let mut coins = vec![0.0; n];
    for t in 0..horizon {
        if t % block == 0 {
            fill_fair_bits(&mut rng, &mut coins);
        }
        entries.extend_from_slice(&coins);
    }
    LossMatrix::new(horizon, n, entries)
}

/// `min(T, max(1, ceil(S^2 / ln n)))`.
pub fn default_batched_epochs(horizon: usize, n: usize, budget: usize) -> Result<usize> {
    if n < 2 {
        return Err(Error::param("n", "needs at least two actions"));
    }
    let e = ceil_tol((budget as f64).powi(2) / (n as f64).ln()) as usize;
    Ok(e.clamp(1, horizon.max(1)))
}

/// Two actions: round 1 is `(0, 1/2)`, even rounds `(1, 0)`, later odd rounds
/// `(0, 1)`.
pub fn alternating_two_action(horizon: usize, n: usize) -> Result<LossMatrix> {
    if n != 2 {
        return Err(Error::param("n", format!("alternating adversary needs n = 2, got {n}")));
    }
    check_shape(horizon, n)?;
    let mut entries = Vec::with_capacity(2 * horizon);
    for t in 1..=horizon {
        let row = match t {
            1 => [0.0, 0.5],
            t if t % 2 == 0 => [1.0, 0.0],
            _ => [0.0, 1.0],
        };
        entries.extend_from_slice(&row);
    }
    LossMatrix::new(horizon, 2, entries)
}

/// `T' = ln(1 / (2 delta)) / (2 eta) + 1`, capped at `T`.
pub fn sd_tail_threshold(horizon: usize, eta: f64, delta: f64) -> Result<f64> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::param("eta", format!("must lie in (0, 1), got {eta}")));
    }
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::param("delta", format!("must lie in (0, 1/2), got {delta}")));
    }
    Ok(((1.0 / (2.0 * delta)).ln() / (2.0 * eta) + 1.0).min(horizon as f64))
}

/// A uniformly drawn bad arm loses 1 in each of the first `ceil(T')` rounds;
/// every other entry is 0. Returns the matrix and the bad arm.
pub fn sd_tail_adversary(
    horizon: usize,
    n: usize,
    eta: f64,
    delta: f64,
    seed: StreamSeed,
) -> Result<(LossMatrix, ActionId)> {
    check_shape(horizon, n)?;
    let bad_rounds = (sd_tail_threshold(horizon, eta, delta)?.ceil() as usize).min(horizon);
    let bad = seed.rng().random_range(0..n);
    let mut entries = vec![0.0; horizon * n];
    for t in 0..bad_rounds {
        entries[t * n + bad] = 1.0;
    }
    Ok((LossMatrix::new(horizon, n, entries)?, ActionId::new(bad)))
}

/// A uniformly drawn arm has Bernoulli(1/2 - eps_gap) losses, every other arm
/// fair coins. The favoured arm is recorded as the matrix's best arm.
pub fn gap_bernoulli(horizon: usize, n: usize, eps_gap: f64, seed: StreamSeed) -> Result<LossMatrix> {
    check_shape(horizon, n)?;
    if !(eps_gap > 0.0 && eps_gap < 0.5) {
        return Err(Error::param("eps_gap", format!("must lie in (0, 1/2), got {eps_gap}")));
    }
    let mut rng = seed.rng();
    let best = rng.random_range(0..n);
    let p_best = 0.5 - eps_gap;
    let mut entries = vec![0.0; horizon * n];
    fill_fair_bits(&mut rng, &mut entries);
    for t in 0..horizon {
        entries[t * n + best] = if rng.random::<f64>() < p_best { 1.0 } else { 0.0 };
    }
    Ok(LossMatrix::new(horizon, n, entries)?.with_best_arm(ActionId::new(best)))
}
