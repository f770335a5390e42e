//! Game loops, Monte Carlo replication, statistics and verification suites.

mod checks;
mod emit;
mod montecarlo;
mod play;
pub mod registry;
mod stats;
mod sweep;
pub mod verify;

pub use checks::{
    check_btl, check_fpl_inequality, linear_loss_range, linear_regret, BtlCheck, FplCheck, FPL_TOLERANCE,
};
pub use emit::{
    emit_results, emit_sweep, read_csv, write_csv, write_json, write_sweep_csv, CsvRecord, OutputFormat, CSV_HEADER,
};
pub use montecarlo::{monte_carlo, replicate, run_experiment, ExperimentResult};
pub use play::{run_adaptive, run_bandit, run_full_info, run_linear};
pub use registry::Experiment;
pub use stats::{
    frequency_se, mean_and_se, nearest_rank, summarize, Quantile, ReplicationRow, StatSummary, TailFrequency,
    DEFAULT_QUANTILES,
};
pub use sweep::{check_grid, loglog_fit, sweep, LogLogFit, SweepResult};
pub use verify::{verify_binomial, verify_btl, verify_fpl, verify_mgf, verify_pev, CheckOutcome, FplSuite, VerifyReport};
