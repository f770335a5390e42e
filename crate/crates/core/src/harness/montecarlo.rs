use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::GameConfig;
use crate::error::{Error, Result};

use super::registry::Experiment;
use super::stats::{summarize, ReplicationRow, StatSummary};

/// Runs `f(0), ..., f(reps - 1)` on `jobs` threads (all cores when `None`)
/// and returns the results in index order.
pub fn replicate<T, F>(reps: u64, jobs: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    if jobs == Some(1) {
        return (0..reps).map(f).collect();
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        if j == 0 {
            return Err(Error::config("jobs", "must be >= 1"));
        }
        builder = builder.num_threads(j);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::config("jobs", format!("cannot start worker pool: {e}")))?;
    pool.install(|| (0..reps).into_par_iter().map(&f).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config: GameConfig,
    pub rows: Vec<ReplicationRow>,
    pub summary: StatSummary,
    /// Wall-clock time; kept out of serialized output so reruns are byte-identical.
    #[serde(skip)]
    pub elapsed: Duration,
}

/// Validates `config` and runs its replications.
pub fn monte_carlo(config: &GameConfig, jobs: Option<usize>) -> Result<ExperimentResult> {
    run_experiment(&Experiment::new(config.clone())?, jobs)
}

pub fn run_experiment(exp: &Experiment, jobs: Option<usize>) -> Result<ExperimentResult> {
    let start = Instant::now();
    let config = exp.config();
    let rows = replicate(config.replications as u64, jobs, |r| exp.run_replication(r))?;
    let summary = summarize(&rows, exp.quantiles(), exp.tail_thresholds(), config.c)?;
    Ok(ExperimentResult {
        config: config.clone(),
        rows,
        summary,
        elapsed: start.elapsed(),
    })
}
