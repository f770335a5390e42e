use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default quantile levels of the summary.
pub const DEFAULT_QUANTILES: [f64; 4] = [0.5, 0.9, 0.95, 0.99];

/// One replication's outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRow {
    pub run_id: u64,
    pub seed: u64,
    pub regret: f64,
    pub switches: usize,
    pub epochs: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantile {
    pub p: f64,
    pub value: f64,
}

/// Empirical `P(regret >= threshold)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailFrequency {
    pub threshold: f64,
    pub frequency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatSummary {
    pub replications: usize,
    pub mean_regret: f64,
    pub std_error_regret: f64,
    pub mean_switches: f64,
    pub std_error_switches: f64,
    pub max_switches: usize,
    pub mean_epochs: f64,
    /// Nearest-rank quantiles of the regret.
    pub quantiles: Vec<Quantile>,
    pub tail_frequencies: Vec<TailFrequency>,
    /// Mean of `regret + c * switches`, when a switching cost is configured.
    pub mean_objective: Option<f64>,
}

/// Sample mean and standard error of the mean; the error is 0 for one sample.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Standard error of a frequency estimated from `reps` Bernoulli draws.
pub fn frequency_se(p: f64, reps: usize) -> f64 {
    (p * (1.0 - p) / reps as f64).sqrt()
}

/// The `ceil(p * n)`-th smallest value, with rank at least 1.
pub fn nearest_rank(sorted: &[f64], p: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::param("quantile", "no samples"));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::param("quantile", format!("level must lie in (0, 1], got {p}")));
    }
    let rank = ((p * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    Ok(sorted[rank - 1])
}

/// Summary of replication rows; a pure function of its inputs.
pub fn summarize(
    rows: &[ReplicationRow],
    quantiles: &[f64],
    tail_thresholds: &[f64],
    cost: Option<f64>,
) -> Result<StatSummary> {
    if rows.is_empty() {
        return Err(Error::config("replications", "must be >= 1"));
    }
    let regrets: Vec<f64> = rows.iter().map(|r| r.regret).collect();
    let switches: Vec<f64> = rows.iter().map(|r| r.switches as f64).collect();
    let epochs: Vec<f64> = rows.iter().map(|r| f64::from(r.epochs)).collect();
    let (mean_regret, std_error_regret) = mean_and_se(&regrets);
    let (mean_switches, std_error_switches) = mean_and_se(&switches);
    let mut sorted = regrets.clone();
    sorted.sort_by(f64::total_cmp);
    let quantiles = quantiles
        .iter()
        .map(|&p| Ok(Quantile { p, value: nearest_rank(&sorted, p)? }))
        .collect::<Result<Vec<_>>>()?;
    let reps = rows.len() as f64;
    let tail_frequencies = tail_thresholds
        .iter()
        .map(|&threshold| TailFrequency {
            threshold,
            frequency: regrets.iter().filter(|&&r| r >= threshold).count() as f64 / reps,
        })
        .collect();
    let mean_objective = cost.map(|c| {
        rows.iter().map(|r| r.regret + c * r.switches as f64).sum::<f64>() / reps
    });
    Ok(StatSummary {
        replications: rows.len(),
        mean_regret,
        std_error_regret,
        mean_switches,
        std_error_switches,
        max_switches: rows.iter().map(|r| r.switches).max().unwrap_or(0),
        mean_epochs: epochs.iter().sum::<f64>() / reps,
        quantiles,
        tail_frequencies,
        mean_objective,
    })
}
