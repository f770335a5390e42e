use super::{DecisionSet, Vertex};
use crate::batching::{framework_restart, Framework};
use crate::error::{Error, Result};
use crate::experts::{Fpl, LinearOracle, PerturbationSchedule};
use crate::game::{LossMatrix, RunTrace};
use crate::util::ceil_tol;

pub const BCPR_QUOTA_CONST: f64 = 23.0;

/// `(ln d)^{-1/2}`.
pub fn default_eta(d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::param("d", format!("default eta needs d >= 2, got {d}")));
    }
    Ok((d as f64).ln().sqrt().recip())
}

/// Perturbed leader over `set` with i.i.d. `N(0, eta^2)` perturbations every
/// round; `eta` defaults to `(ln d)^{-1/2}`.
pub fn cpr_policy(set: DecisionSet, eta: Option<f64>) -> Result<Fpl<DecisionSet>> {
    let eta = match eta {
        Some(e) => e,
        None => default_eta(set.d())?,
    };
    Fpl::new(set, PerturbationSchedule::Gaussian { eta })
}

/// `ceil(23 c m sqrt(T / ln(2/delta)) ln d)`.
pub fn bcpr_quota(set: &DecisionSet, horizon: usize, delta: f64, switch_const: f64) -> Result<usize> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::param("delta", format!("must lie in (0, 1/2), got {delta}")));
    }
    if !(switch_const > 0.0) {
        return Err(Error::param("switch_const", format!("must be > 0, got {switch_const}")));
    }
    if set.d() < 2 {
        return Err(Error::param("d", "needs d >= 2"));
    }
    let raw = BCPR_QUOTA_CONST
        * switch_const
        * set.m() as f64
        * (horizon as f64 / (2.0 / delta).ln()).sqrt()
        * (set.d() as f64).ln();
    Ok((ceil_tol(raw) as usize).max(1))
}

/// Batched restarts of CPR; `quota` overrides the default `S'`.
pub fn bcpr(
    set: DecisionSet,
    horizon: usize,
    delta: f64,
    switch_const: f64,
    eta: Option<f64>,
    quota: Option<usize>,
) -> Result<Framework<Fpl<DecisionSet>>> {
    let default_quota = bcpr_quota(&set, horizon, delta, switch_const)?;
    framework_restart(cpr_policy(set, eta)?, quota.unwrap_or(default_quota))
}

fn check_width(set: &DecisionSet, matrix: &LossMatrix) -> Result<()> {
    if matrix.actions() != set.d() {
        return Err(Error::DimensionMismatch(format!(
            "loss matrix has {} coordinates, decision set has d = {}",
            matrix.actions(),
            set.d()
        )));
    }
    Ok(())
}

/// Best fixed vertex for the summed losses, and its loss.
pub fn comb_best_in_hindsight(set: &DecisionSet, matrix: &LossMatrix) -> Result<(Vertex, f64)> {
    check_width(set, matrix)?;
    let sums = matrix.column_sums();
    let v = set.argmin(&sums);
    let loss = v.dot(&sums);
    Ok((v, loss))
}

pub fn comb_regret(trace: &RunTrace<Vertex>, set: &DecisionSet, matrix: &LossMatrix) -> Result<f64> {
    if trace.len() != matrix.rounds() {
        return Err(Error::DimensionMismatch(format!(
            "trace has {} rounds, matrix has {}",
            trace.len(),
            matrix.rounds()
        )));
    }
    Ok(trace.total_loss() - comb_best_in_hindsight(set, matrix)?.1)
}

/// `max_t (max_v l_t . v - min_v l_t . v)`, at most `m`.
pub fn comb_loss_range(set: &DecisionSet, matrix: &LossMatrix) -> Result<f64> {
    check_width(set, matrix)?;
    Ok(matrix
        .rows()
        .map(|row| set.max_value(row) - set.argmin(row).dot(row))
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experts::OnlinePolicy;
    use crate::seed::{Role, StreamSeed};

    #[test]
    fn bcpr_quota_value() {
        let set = DecisionSet::top_m(64, 4).unwrap();
        let raw = 23.0 * 4.0 * (1e4 / 20f64.ln()).sqrt() * 64f64.ln();
        assert!((raw - 22106.15).abs() < 0.01, "{raw}");
        assert_eq!(bcpr_quota(&set, 10_000, 0.1, 1.0).unwrap(), raw.ceil() as usize);
    }

    #[test]
    fn default_eta_value() {
        assert!((default_eta(64).unwrap() - 1.0 / 64f64.ln().sqrt()).abs() < 1e-15);
        assert!(default_eta(1).is_err());
    }

    #[test]
    fn zero_noise_cpr_is_ftl_over_vertices() {
        let set = DecisionSet::top_m(5, 2).unwrap();
        let mut p = Fpl::new(set.clone(), PerturbationSchedule::Injected(vec![])).unwrap();
        p.reset(StreamSeed::new(1, 1));
        let rows: Vec<Vec<f64>> = (0..12)
            .map(|t| (0..5).map(|j| ((t + j) % 3) as f64 / 2.0).collect())
            .collect();
        let mut cum = vec![0.0; 5];
        for row in &rows {
            let v = p.choose().unwrap();
            assert_eq!(v, set.argmin(&cum));
            p.observe(row).unwrap();
            for (c, l) in cum.iter_mut().zip(row) {
                *c += l;
            }
        }
    }

    #[test]
    fn gaussian_draws_have_the_right_moments() {
        let eta = 0.7;
        let d = 4;
        let mut p = cpr_policy(DecisionSet::top_m(d, 2).unwrap(), Some(eta)).unwrap();
        let rounds = 25_000;
        p.reset(StreamSeed::derive(3, 0, Role::Algorithm));
        for _ in 0..rounds {
            p.choose().unwrap();
            p.observe(&vec![0.0; d]).unwrap();
        }
        let rec = p.fpl_record().unwrap();
        let rows = &rec.epochs[0].perturbations;
        let count = (rows.len() * d) as f64;
        assert!(count >= 1e5);
        let mean = rows.iter().flatten().sum::<f64>() / count;
        let var = rows.iter().flatten().map(|x| (x - mean).powi(2)).sum::<f64>() / count;
        assert!(mean.abs() < 3.0 * eta / count.sqrt(), "mean {mean}");
        assert!((var / (eta * eta) - 1.0).abs() < 0.05, "var {var}");
    }

    #[test]
    fn comb_loss_range_is_at_most_m() {
        let set = DecisionSet::top_m(6, 3).unwrap();
        let m = LossMatrix::from_rows(&[vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0], vec![0.5; 6]]).unwrap();
        assert_eq!(comb_loss_range(&set, &m).unwrap(), 3.0);
        let (v, loss) = comb_best_in_hindsight(&set, &m).unwrap();
        assert_eq!(v.support(), &[0, 1, 2]);
        assert_eq!(loss, 1.5);
    }
}
