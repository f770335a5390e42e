use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::montecarlo::ExperimentResult;
use super::stats::{Quantile, ReplicationRow, StatSummary, TailFrequency};
use super::sweep::SweepResult;

pub const CSV_HEADER: &str = "run_id,algorithm,adversary,T,n,S,c,delta,seed,regret,switches,epochs";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::config("format", format!("expected csv or json, got `{other}`"))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

/// One CSV line; `None` fields are empty cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRecord {
    pub run_id: u64,
    pub algorithm: String,
    pub adversary: String,
    #[serde(rename = "T")]
    pub horizon: usize,
    #[serde(rename = "n")]
    pub actions: usize,
    #[serde(rename = "S")]
    pub budget: Option<usize>,
    pub c: Option<f64>,
    pub delta: Option<f64>,
    pub seed: u64,
    pub regret: f64,
    pub switches: usize,
    pub epochs: u32,
}

impl CsvRecord {
    pub fn row(&self) -> ReplicationRow {
        ReplicationRow {
            run_id: self.run_id,
            seed: self.seed,
            regret: self.regret,
            switches: self.switches,
            epochs: self.epochs,
        }
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

fn io_error(e: std::io::Error) -> Error {
    Error::Parse(e.to_string())
}

/// Replication rows followed by `# key=value` summary lines.
pub fn write_csv<W: Write>(mut writer: W, result: &ExperimentResult) -> Result<()> {
    {
        let mut w = csv::Writer::from_writer(&mut writer);
        let cfg = &result.config;
        for row in &result.rows {
            w.serialize(CsvRecord {
                run_id: row.run_id,
                algorithm: cfg.algorithm.clone(),
                adversary: cfg.adversary.clone(),
                horizon: cfg.horizon,
                actions: cfg.actions,
                budget: cfg.budget,
                c: cfg.c,
                delta: cfg.delta,
                seed: row.seed,
                regret: row.regret,
                switches: row.switches,
                epochs: row.epochs,
            })
            .map_err(csv_error)?;
        }
        w.flush().map_err(io_error)?;
    }
    write_summary_lines(&mut writer, &result.summary)
}

fn write_summary_lines<W: Write>(w: &mut W, s: &StatSummary) -> Result<()> {
    let mut lines = vec![
        format!("replications={}", s.replications),
        format!("mean_regret={}", s.mean_regret),
        format!("std_error_regret={}", s.std_error_regret),
        format!("mean_switches={}", s.mean_switches),
        format!("std_error_switches={}", s.std_error_switches),
        format!("max_switches={}", s.max_switches),
        format!("mean_epochs={}", s.mean_epochs),
    ];
    lines.extend(s.quantiles.iter().map(|q| format!("quantile_{}={}", q.p, q.value)));
    lines.extend(s.tail_frequencies.iter().map(|t| format!("tail_{}={}", t.threshold, t.frequency)));
    if let Some(o) = s.mean_objective {
        lines.push(format!("mean_objective={o}"));
    }
    for l in lines {
        writeln!(w, "# {l}").map_err(io_error)?;
    }
    Ok(())
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Parse(format!("summary `{key}`: cannot parse `{v}`")))
}

fn parse_summary(lines: &[&str]) -> Result<StatSummary> {
    let mut s = StatSummary {
        replications: 0,
        mean_regret: f64::NAN,
        std_error_regret: f64::NAN,
        mean_switches: f64::NAN,
        std_error_switches: f64::NAN,
        max_switches: 0,
        mean_epochs: f64::NAN,
        quantiles: Vec::new(),
        tail_frequencies: Vec::new(),
        mean_objective: None,
    };
    let mut seen = 0;
    for line in lines {
        let body = line.trim_start_matches('#').trim();
        let (key, v) = body
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("summary line `{line}` is not key=value")))?;
        match key {
            "replications" => s.replications = parse_num(key, v)?,
            "mean_regret" => s.mean_regret = parse_num(key, v)?,
            "std_error_regret" => s.std_error_regret = parse_num(key, v)?,
            "mean_switches" => s.mean_switches = parse_num(key, v)?,
            "std_error_switches" => s.std_error_switches = parse_num(key, v)?,
            "max_switches" => s.max_switches = parse_num(key, v)?,
            "mean_epochs" => s.mean_epochs = parse_num(key, v)?,
            "mean_objective" => s.mean_objective = Some(parse_num(key, v)?),
            k if k.starts_with("quantile_") => s.quantiles.push(Quantile {
                p: parse_num(key, &k["quantile_".len()..])?,
                value: parse_num(key, v)?,
            }),
            k if k.starts_with("tail_") => s.tail_frequencies.push(TailFrequency {
                threshold: parse_num(key, &k["tail_".len()..])?,
                frequency: parse_num(key, v)?,
            }),
            other => return Err(Error::Parse(format!("unknown summary key `{other}`"))),
        }
        seen += 1;
    }
    if seen < 7 {
        return Err(Error::Parse("summary block is incomplete".into()));
    }
    Ok(s)
}

/// Reads back the CSV written by [`write_csv`].
pub fn read_csv<R: Read>(mut reader: R) -> Result<(Vec<CsvRecord>, StatSummary)> {
    let mut text = String::new();
    reader.read_to_string(&mut text).map_err(io_error)?;
    let (comments, body): (Vec<&str>, Vec<&str>) = text.lines().partition(|l| l.starts_with('#'));
    match body.first() {
        Some(h) if *h == CSV_HEADER => {}
        _ => return Err(Error::Parse(format!("expected header `{CSV_HEADER}`"))),
    }
    let joined = body.join("\n");
    let mut r = csv::Reader::from_reader(joined.as_bytes());
    let records = r
        .deserialize()
        .collect::<std::result::Result<Vec<CsvRecord>, _>>()
        .map_err(csv_error)?;
    Ok((records, parse_summary(&comments)?))
}

pub fn write_json<W: Write>(writer: W, result: &ExperimentResult) -> Result<()> {
    serde_json::to_writer_pretty(writer, result).map_err(|e| Error::Parse(e.to_string()))
}

/// Grid points with their summaries, then the fit as `#` lines.
pub fn write_sweep_csv<W: Write>(mut w: W, sweep: &SweepResult) -> Result<()> {
    writeln!(w, "{},mean_regret,std_error_regret,mean_switches,max_switches,replications", sweep.parameter)
        .map_err(io_error)?;
    for (x, r) in sweep.grid.iter().zip(&sweep.results) {
        let s = &r.summary;
        writeln!(
            w,
            "{x},{},{},{},{},{}",
            s.mean_regret, s.std_error_regret, s.mean_switches, s.max_switches, s.replications
        )
        .map_err(io_error)?;
    }
    let f = &sweep.fit;
    writeln!(w, "# slope={}", f.slope).map_err(io_error)?;
    writeln!(w, "# intercept={}", f.intercept).map_err(io_error)?;
    writeln!(w, "# slope_ci_low={}", f.ci_low).map_err(io_error)?;
    writeln!(w, "# slope_ci_high={}", f.ci_high).map_err(io_error)?;
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn finish(mut w: BufWriter<File>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn emit_results(result: &ExperimentResult, path: impl AsRef<Path>, format: OutputFormat) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    match format {
        OutputFormat::Csv => write_csv(&mut w, result)?,
        OutputFormat::Json => write_json(&mut w, result)?,
    }
    finish(w, path)
}

pub fn emit_sweep(sweep: &SweepResult, path: impl AsRef<Path>, format: OutputFormat) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    match format {
        OutputFormat::Csv => write_sweep_csv(&mut w, sweep)?,
        OutputFormat::Json => serde_json::to_writer_pretty(&mut w, sweep).map_err(|e| Error::Parse(e.to_string()))?,
    }
    finish(w, path)
}
