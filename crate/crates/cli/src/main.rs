use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use switchbench::config::GameConfig;
use switchbench::harness::registry::listing;
use switchbench::harness::{
    monte_carlo, sweep, verify_binomial, verify_btl, verify_fpl, verify_mgf, verify_pev, write_csv, write_sweep_csv,
    FplSuite, VerifyReport,
};
use switchbench::Error;

const SEED_ENV: &str = "SWITCHBENCH_SEED";

#[derive(Parser)]
#[command(name = "switchbench", version, about = "Monte Carlo benchmarks for switching-constrained online learning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Pev,
    Mgf,
    Binomial,
    Fpl,
    Btl,
    All,
}

#[derive(clap::Args)]
struct Common {
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Base seed; overrides SWITCHBENCH_SEED and the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; all cores when omitted.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the replications of one config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides as `key=value`, comma-separated or repeated.
        #[arg(long = "param")]
        params: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Run a config over a grid of one parameter and fit the log-log slope.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Parameter to vary, e.g. S, c, T or n.
        #[arg(long = "param")]
        parameter: String,
        /// Comma-separated, strictly increasing values.
        #[arg(long)]
        grid: String,
        #[command(flatten)]
        common: Common,
    },
    /// Run verification suites; exits 1 if any check fails.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        /// Suite settings as `key=value`: N, n, t, reps, T, r, runs, instances.
        #[arg(long = "param")]
        params: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// List algorithm and adversary ids with their parameters.
    List,
}

enum Failure {
    Verification,
    Failed(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Failed(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } => 3,
        _ => 2,
    }
}

fn parse_pairs(items: &[String]) -> Result<Vec<(String, String)>, Error> {
    let mut out = Vec::new();
    for item in items.iter().flat_map(|s| s.split(',')) {
        let item = item.trim();
        if item.is_empty() {
            continue;
        }
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("--param `{item}` is not key=value")))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn env_seed() -> Result<Option<u64>, Error> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| Error::Config {
            key: SEED_ENV.into(),
            reason: format!("cannot parse `{v}` as a seed"),
        }),
        Err(_) => Ok(None),
    }
}

fn load_config(path: &Path, flag_seed: Option<u64>) -> Result<GameConfig, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let mut cfg = GameConfig::parse(&text)?;
    if let Some(seed) = flag_seed.or(env_seed()?) {
        cfg.seed = seed;
    }
    Ok(cfg)
}

/// Writes the rendered output to `out`, or to standard output.
fn deliver(buf: &[u8], out: &Option<PathBuf>) -> Result<(), Error> {
    match out {
        Some(p) => fs::write(p, buf).map_err(|e| Error::Io {
            path: p.clone(),
            source: e,
        }),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(buf).and_then(|_| stdout.flush()).map_err(|e| Error::Io {
                path: PathBuf::from("<stdout>"),
                source: e,
            })
        }
    }
}

fn json_line<T: serde::Serialize + ?Sized>(buf: &mut Vec<u8>, value: &T) -> Result<(), Error> {
    serde_json::to_writer_pretty(&mut *buf, value).map_err(|e| Error::Parse(e.to_string()))?;
    buf.push(b'\n');
    Ok(())
}

fn cmd_run(config: &Path, params: &[String], common: &Common) -> Result<(), Failure> {
    let mut cfg = load_config(config, common.seed)?;
    for (k, v) in parse_pairs(params)? {
        cfg.set(&k, &v)?;
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    let result = monte_carlo(&cfg, common.jobs)?;
    let mut buf = Vec::new();
    match common.format {
        Format::Csv => write_csv(&mut buf, &result)?,
        Format::Json => json_line(&mut buf, &result)?,
    }
    deliver(&buf, &common.out)?;
    eprintln!(
        "{} replications in {:.2}s",
        result.summary.replications,
        result.elapsed.as_secs_f64()
    );
    Ok(())
}

fn cmd_sweep(config: &Path, parameter: &str, grid: &str, common: &Common) -> Result<(), Failure> {
    let cfg = load_config(config, common.seed)?;
    let grid = grid
        .split(',')
        .map(|x| {
            x.trim().parse::<f64>().map_err(|_| Error::Config {
                key: "grid".into(),
                reason: format!("cannot parse `{x}`"),
            })
        })
        .collect::<Result<Vec<f64>, Error>>()?;
    let res = sweep(&cfg, parameter, &grid, common.jobs)?;
    let mut buf = Vec::new();
    match common.format {
        Format::Csv => write_sweep_csv(&mut buf, &res)?,
        Format::Json => json_line(&mut buf, &res)?,
    }
    deliver(&buf, &common.out)?;
    eprintln!(
        "slope {:.4} (95% CI {:.4} to {:.4})",
        res.fit.slope, res.fit.ci_low, res.fit.ci_high
    );
    Ok(())
}

struct SuiteParams(BTreeMap<String, String>);

impl SuiteParams {
    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, Error> {
        self.0
            .get(key)
            .map(|v| {
                v.parse().map_err(|_| Error::Config {
                    key: key.into(),
                    reason: format!("cannot parse `{v}`"),
                })
            })
            .transpose()
    }

    fn or<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, Error> {
        Ok(self.get(key)?.unwrap_or(default))
    }
}

fn cmd_verify(suite: Suite, params: &[String], common: &Common) -> Result<(), Failure> {
    let p = SuiteParams(parse_pairs(params)?.into_iter().collect());
    let seed = match common.seed {
        Some(s) => s,
        None => env_seed()?.unwrap_or(0),
    };
    let jobs = common.jobs;
    let want = |s: Suite| suite == s || suite == Suite::All;
    let mut reports: Vec<VerifyReport> = Vec::new();
    if want(Suite::Pev) {
        reports.push(verify_pev(p.or("N", 5)?, p.or("n", 10)?, p.or("reps", 1_000_000)?, seed, jobs)?);
    }
    if want(Suite::Mgf) {
        let t = p.or("t", 0.5)?;
        let reps = p.or("reps", 1_000_000)?;
        let ns = match p.get::<usize>("n")? {
            Some(n) => vec![n],
            None => vec![2, 100],
        };
        for n in ns {
            reports.push(verify_mgf(t, n, reps, seed, jobs)?);
        }
    }
    if want(Suite::Binomial) {
        let r = p.or("r", 1.0)?;
        let ts = match p.get::<u64>("T")? {
            Some(t) => vec![t],
            None => vec![100, 400],
        };
        for t in ts {
            reports.push(verify_binomial(t, r)?);
        }
    }
    if want(Suite::Fpl) {
        let defaults = FplSuite::default();
        let fpl = FplSuite {
            horizon: p.or("T", defaults.horizon)?,
            actions: p.or("n", defaults.actions)?,
            quota: p.or("quota", defaults.quota)?,
        };
        reports.push(verify_fpl(p.or("runs", 10_000)?, fpl, seed, jobs)?);
    }
    if want(Suite::Btl) {
        reports.push(verify_btl(p.or("instances", 1_000)?, seed, jobs)?);
    }
    let mut buf = Vec::new();
    match common.format {
        Format::Csv => {
            for r in &reports {
                buf.extend_from_slice(r.to_string().as_bytes());
            }
        }
        Format::Json => json_line(&mut buf, &reports)?,
    }
    deliver(&buf, &common.out)?;
    if reports.iter().all(VerifyReport::passed) {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run { config, params, common } => cmd_run(config, params, common),
        Command::Sweep { config, parameter, grid, common } => cmd_sweep(config, parameter, grid, common),
        Command::Verify { suite, params, common } => cmd_verify(*suite, params, common),
        Command::List => {
            print!("{}", listing());
            Ok(())
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(Failure::Failed(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
