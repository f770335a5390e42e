use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::config::GameConfig;
use crate::error::{Error, Result};

use super::montecarlo::{monte_carlo, ExperimentResult};

/// Least-squares line through `(ln x, ln y)` with a 95% interval on the slope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub points: usize,
}

impl LogLogFit {
    pub fn within(&self, target: f64, tolerance: f64) -> bool {
        (self.slope - target).abs() <= tolerance
    }
}

/// Fits `ln y = a + b ln x`. Two points give an exact line with an infinite
/// interval.
pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> Result<LogLogFit> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch(format!("{} x values, {} y values", xs.len(), ys.len())));
    }
    if xs.len() < 2 {
        return Err(Error::param("grid", "a fit needs at least two points"));
    }
    if let Some(bad) = xs.iter().chain(ys).find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::param("grid", format!("log-log fit needs positive values, got {bad}")));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::param("grid", "all grid values are equal"));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let (slope_se, half) = if lx.len() > 2 {
        let sse: f64 = lx.iter().zip(&ly).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
        let df = k - 2.0;
        let se = (sse / df / sxx).sqrt();
        let t = StudentsT::new(0.0, 1.0, df)
            .map_err(|e| Error::param("grid", e.to_string()))?
            .inverse_cdf(0.975);
        (se, t * se)
    } else {
        (f64::INFINITY, f64::INFINITY)
    };
    Ok(LogLogFit {
        slope,
        intercept,
        slope_se,
        ci_low: slope - half,
        ci_high: slope + half,
        points: lx.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub parameter: String,
    pub grid: Vec<f64>,
    pub results: Vec<ExperimentResult>,
    /// Slope of ln(mean regret) against ln(parameter).
    pub fit: LogLogFit,
}

fn format_value(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        x.to_string()
    }
}

/// Checks that `grid` is strictly increasing with at least three points.
pub fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 3 {
        return Err(Error::config("grid", format!("needs at least 3 values, got {}", grid.len())));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::config("grid", "values must be strictly increasing"));
    }
    Ok(())
}

/// Runs `template` once per grid value of `parameter` and fits the log-log
/// slope of mean regret.
pub fn sweep(template: &GameConfig, parameter: &str, grid: &[f64], jobs: Option<usize>) -> Result<SweepResult> {
    check_grid(grid)?;
    let configs = grid
        .iter()
        .map(|&x| {
            let mut cfg = template.clone();
            cfg.set(parameter, &format_value(x))?;
            cfg.validate()?;
            Ok(cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    let results = configs
        .iter()
        .map(|cfg| monte_carlo(cfg, jobs))
        .collect::<Result<Vec<_>>>()?;
    let means: Vec<f64> = results.iter().map(|r| r.summary.mean_regret).collect();
    let fit = loglog_fit(grid, &means)?;
    Ok(SweepResult {
        parameter: parameter.to_string(),
        grid: grid.to_vec(),
        results,
        fit,
    })
}
