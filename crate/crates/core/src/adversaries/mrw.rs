use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{ActionId, LossMatrix};
use crate::seed::StreamSeed;
use crate::util::standard_normal;

/// Largest gap for which the walk's drift bound is stated.
pub const MRW_EPS_MAX: f64 = 1.0 / 6.0;

/// Largest `i` with `2^i` dividing `t`.
pub fn dyadic_valuation(t: u64) -> Result<u32> {
    if t == 0 {
        return Err(Error::param("t", "dyadic valuation needs t >= 1"));
    }
    Ok(t.trailing_zeros())
}

/// `W_0 = 0`, `W_t = W_{parent(t)} + Z_t` with `noise[t-1] = Z_t`. Returns
/// `W_1..W_T`.
pub fn walk_with_parent(noise: &[f64], parent: impl Fn(usize) -> usize) -> Vec<f64> {
    let mut w = vec![0.0; noise.len() + 1];
    for t in 1..=noise.len() {
        let p = parent(t);
        debug_assert!(p < t);
        w[t] = w[p] + noise[t - 1];
    }
    w.remove(0);
    w
}

/// The multi-scale walk with parent `p(t) = t - 2^{delta(t)}`.
pub fn walk_from_noise(noise: &[f64]) -> Vec<f64> {
    walk_with_parent(noise, |t| t - (1usize << t.trailing_zeros()))
}

/// Multi-scale walk driven by i.i.d. `N(0, sigma^2)` increments.
pub fn mrw_walk(horizon: usize, sigma: f64, seed: StreamSeed) -> Result<Vec<f64>> {
    if horizon == 0 {
        return Err(Error::param("T", "horizon must be >= 1"));
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::param("sigma", format!("must be >= 0, got {sigma}")));
    }
    let mut rng = seed.rng();
    let noise: Vec<f64> = (0..horizon).map(|_| sigma * standard_normal(&mut rng)).collect();
    Ok(walk_from_noise(&noise))
}

pub fn clip(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MrwParams {
    /// Gap of the hidden best arm, after clamping to [`MRW_EPS_MAX`].
    pub epsilon: f64,
    pub sigma: f64,
    /// Whether the formula's gap exceeded [`MRW_EPS_MAX`] and was clamped.
    pub clamped: bool,
}

impl MrwParams {
    /// `epsilon = sqrt(n) / (54 sqrt(S) (log2 T)^{3/2})`, `sigma = 1 / (9 log2 T)`.
    pub fn new(horizon: usize, n: usize, budget: usize) -> Result<Self> {
        if horizon < 2 {
            return Err(Error::param("T", "the walk needs T >= 2"));
        }
        if budget == 0 {
            return Err(Error::param("S", "budget must be >= 1"));
        }
        if n < 2 {
            return Err(Error::param("n", "needs at least two actions"));
        }
        let log2t = (horizon as f64).log2();
        let raw = (n as f64).sqrt() / (54.0 * (budget as f64).sqrt() * log2t.powf(1.5));
        let clamped = raw > MRW_EPS_MAX;
        if clamped {
            log::warn!("MRW gap {raw:.4} exceeds 1/6; clamping");
        }
        Ok(MrwParams {
            epsilon: raw.min(MRW_EPS_MAX),
            sigma: 1.0 / (9.0 * log2t),
            clamped,
        })
    }
}

/// `l_t(i) = clip(W_t + 1/2 - epsilon 1{i = i*})` with `i*` uniform; `i*` is
/// recorded as the matrix's best arm.
pub fn mrw_adversary(horizon: usize, n: usize, budget: usize, seed: StreamSeed) -> Result<LossMatrix> {
    let params = MrwParams::new(horizon, n, budget)?;
    let mut rng = seed.rng();
    let best = rng.random_range(0..n);
    let noise: Vec<f64> = (0..horizon)
        .map(|_| params.sigma * standard_normal(&mut rng))
        .collect();
    let walk = walk_from_noise(&noise);
    let mut entries = Vec::with_capacity(horizon * n);
    for w in walk {
        let base = w + 0.5;
        for i in 0..n {
            let gap = if i == best { params.epsilon } else { 0.0 };
            entries.push(clip(base - gap));
        }
    }
    Ok(LossMatrix::new(horizon, n, entries)?.with_best_arm(ActionId::new(best)))
}
