use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experts::{FplEpoch, FplRecord, LinearOracle};
use crate::game::{LossMatrix, RunTrace};

/// Slack allowed by [`check_fpl_inequality`].
pub const FPL_TOLERANCE: f64 = 1e-9;

/// Both sides of the pointwise perturbed-leader inequality for one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FplCheck {
    pub regret: f64,
    pub bound: f64,
    /// Largest per-round spread `max_v l.v - min_v l.v`.
    pub loss_range: f64,
    /// In-epoch switches plus, per epoch, the move to its post-epoch leader.
    pub extended_switches: usize,
    pub holds: bool,
}

fn check_shapes<O: LinearOracle>(oracle: &O, trace: &RunTrace<O::Action>, matrix: &LossMatrix) -> Result<()> {
    if oracle.dim() != matrix.actions() {
        return Err(Error::DimensionMismatch(format!(
            "matrix has {} columns, action set expects {}",
            matrix.actions(),
            oracle.dim()
        )));
    }
    if trace.len() != matrix.rounds() {
        return Err(Error::DimensionMismatch(format!(
            "trace has {} rounds, matrix has {}",
            trace.len(),
            matrix.rounds()
        )));
    }
    Ok(())
}

fn check_epochs<A>(record: &FplRecord<A>, rounds: usize) -> Result<()> {
    let mut next = 0;
    for e in &record.epochs {
        if e.start != next || e.len == 0 {
            return Err(Error::MissingSchedule(format!("epoch record starting at round {} is out of sequence", e.start + 1)));
        }
        next += e.len;
    }
    if next != rounds {
        return Err(Error::MissingSchedule(format!("record covers {next} rounds, trace has {rounds}")));
    }
    Ok(())
}

/// Regret of a trace against the best fixed action of `oracle`.
pub fn linear_regret<O: LinearOracle>(oracle: &O, trace: &RunTrace<O::Action>, matrix: &LossMatrix) -> Result<f64> {
    check_shapes(oracle, trace, matrix)?;
    let sums = matrix.column_sums();
    let best = oracle.value(&oracle.argmin(&sums), &sums);
    Ok(trace.total_loss() - best)
}

/// Largest per-round spread of the linear losses.
pub fn linear_loss_range<O: LinearOracle>(oracle: &O, matrix: &LossMatrix) -> f64 {
    matrix
        .rows()
        .map(|row| oracle.max_value(row) - oracle.value(&oracle.argmin(row), row))
        .fold(0.0, f64::max)
}

fn perturbation_row<A>(epoch: &FplEpoch<A>, k: usize, dim: usize) -> Vec<f64> {
    (0..dim).map(|j| epoch.perturbation(k, j)).collect()
}

/// Checks `regret <= M * switches + sum_e (max_v P_e.v - sum_t P_t.a_t)` on a
/// recorded perturbed-leader run, where each epoch's sums run over its rounds
/// plus the perturbation that picks its post-epoch leader.
pub fn check_fpl_inequality<O: LinearOracle>(
    oracle: &O,
    trace: &RunTrace<O::Action>,
    matrix: &LossMatrix,
    record: Option<&FplRecord<O::Action>>,
) -> Result<FplCheck> {
    let record = record.ok_or_else(|| Error::MissingSchedule("no perturbation record".into()))?;
    check_shapes(oracle, trace, matrix)?;
    check_epochs(record, trace.len())?;
    let dim = oracle.dim();
    let actions = trace.actions();
    let m = linear_loss_range(oracle, matrix);
    let mut switches = 0usize;
    let mut perturbation_term = 0.0;
    for e in &record.epochs {
        let played = &actions[e.start..e.start + e.len];
        switches += played.windows(2).filter(|w| w[0] != w[1]).count();
        if played[e.len - 1] != e.next_leader {
            switches += 1;
        }
        let mut total = vec![0.0; dim];
        let mut picked = 0.0;
        for k in 0..=e.len {
            let p = perturbation_row(e, k, dim);
            for (acc, x) in total.iter_mut().zip(&p) {
                *acc += x;
            }
            let a = if k < e.len { &played[k] } else { &e.next_leader };
            picked += oracle.value(a, &p);
        }
        perturbation_term += oracle.max_value(&total) - picked;
    }
    let regret = linear_regret(oracle, trace, matrix)?;
    let bound = m * switches as f64 + perturbation_term;
    Ok(FplCheck {
        regret,
        bound,
        loss_range: m,
        extended_switches: switches,
        holds: regret <= bound + FPL_TOLERANCE,
    })
}

/// Outcome of the be-the-leader check on a recorded run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BtlCheck {
    /// Every recomputed leader equals the action the learner played.
    pub leaders_match: bool,
    /// Smallest `sum_k lhat_k.v - sum_k lhat_k.j_{k+1}` over comparators `v`.
    pub min_slack: f64,
    pub comparators: usize,
    pub holds: bool,
}

/// Recomputes each epoch's leaders on the perturbed losses
/// `lhat_0 = P_1`, `lhat_k = l_k + P_{k+1}` and checks that the sequence of
/// leaders beats every fixed action of the enumerable set, up to `tolerance`.
pub fn check_btl<O: LinearOracle>(
    oracle: &O,
    trace: &RunTrace<O::Action>,
    matrix: &LossMatrix,
    record: &FplRecord<O::Action>,
    tolerance: f64,
) -> Result<BtlCheck> {
    check_shapes(oracle, trace, matrix)?;
    check_epochs(record, trace.len())?;
    let comparators = oracle
        .all_actions()
        .ok_or_else(|| Error::param("oracle", "be-the-leader check needs an enumerable action set"))?;
    let dim = oracle.dim();
    let actions = trace.actions();
    let mut leaders_match = true;
    let mut min_slack = f64::INFINITY;
    for e in &record.epochs {
        let mut cumulative = perturbation_row(e, 0, dim);
        let mut comparator_sums: Vec<f64> = comparators.iter().map(|v| oracle.value(v, &cumulative)).collect();
        let mut leader = oracle.argmin(&cumulative);
        let mut leader_sum = oracle.value(&leader, &cumulative);
        for k in 1..=e.len {
            if leader != actions[e.start + k - 1] {
                leaders_match = false;
            }
            let row = matrix.row(e.start + k - 1);
            let p = perturbation_row(e, k, dim);
            let hat: Vec<f64> = row.iter().zip(&p).map(|(l, x)| l + x).collect();
            // same accumulation order as the learner: loss first, then noise
            for j in 0..dim {
                cumulative[j] += row[j];
                cumulative[j] += p[j];
            }
            leader = oracle.argmin(&cumulative);
            leader_sum += oracle.value(&leader, &hat);
            for (acc, v) in comparator_sums.iter_mut().zip(&comparators) {
                *acc += oracle.value(v, &hat);
            }
        }
        if leader != e.next_leader {
            leaders_match = false;
        }
        for s in comparator_sums {
            min_slack = min_slack.min(s - leader_sum);
        }
    }
    Ok(BtlCheck {
        leaders_match,
        min_slack,
        comparators: comparators.len(),
        holds: leaders_match && min_slack >= -tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversaries::{alternating_two_action, iid_bernoulli};
    use crate::batching::bpr;
    use crate::combinatorial::{cpr_policy, DecisionSet};
    use crate::experts::{fpl_policy, ftl_policy, mfpl_policy, ExpertOracle, OnlinePolicy, PerturbationSchedule};
    use crate::harness::{run_full_info, run_linear};
    use crate::seed::{Role, StreamSeed};

    #[test]
    fn ftl_reduces_to_switch_bound() {
        let m = alternating_two_action(30, 2).unwrap();
        let mut p = ftl_policy(2).unwrap();
        p.reset(StreamSeed::new(0, 0));
        let tr = run_full_info(&mut p, &m).unwrap();
        let oracle = ExpertOracle { n: 2 };
        let check = check_fpl_inequality(&oracle, &tr, &m, p.fpl_record().as_ref()).unwrap();
        // zero perturbations leave only the switching term
        assert_eq!(check.bound, check.loss_range * check.extended_switches as f64);
        assert!(check.holds);
    }

    #[test]
    fn missing_record_is_an_error() {
        let m = alternating_two_action(4, 2).unwrap();
        let mut p = ftl_policy(2).unwrap();
        p.reset(StreamSeed::new(0, 0));
        let tr = run_full_info(&mut p, &m).unwrap();
        let oracle = ExpertOracle { n: 2 };
        assert!(matches!(
            check_fpl_inequality(&oracle, &tr, &m, None),
            Err(Error::MissingSchedule(_))
        ));
    }

    #[test]
    fn hand_computed_single_epoch() {
        // P_1 = (0.5, 0), later rows zero; losses (0,1), (1,0)
        let sched = PerturbationSchedule::Injected(vec![vec![0.5, 0.0]]);
        let mut p = fpl_policy(2, sched).unwrap();
        p.reset(StreamSeed::new(0, 0));
        let m = LossMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let tr = run_full_info(&mut p, &m).unwrap();
        // round 1 plays 2 (0.5 > 0), round 2 sees (0.5, 1) and plays 1
        assert_eq!(tr.total_loss(), 2.0);
        let oracle = ExpertOracle { n: 2 };
        let check = check_fpl_inequality(&oracle, &tr, &m, p.fpl_record().as_ref()).unwrap();
        // after both rounds totals are (1.5, 1): leader 2, so 2 extended switches
        assert_eq!(check.extended_switches, 2);
        assert_eq!(check.regret, 1.0);
        // 1 * 2 + (0.5 - 0 - 0)
        assert_eq!(check.bound, 2.5);
        let btl = check_btl(&oracle, &tr, &m, &p.fpl_record().unwrap(), 0.0).unwrap();
        assert!(btl.holds && btl.leaders_match);
    }

    #[test]
    fn mfpl_and_bpr_runs_satisfy_both_checks() {
        let oracle = ExpertOracle { n: 5 };
        let mut multi_epoch = 0;
        for r in 0..20 {
            let m = iid_bernoulli(200, 5, StreamSeed::derive(3, r, Role::Adversary)).unwrap();
            let seed = StreamSeed::derive(3, r, Role::Algorithm);
            let mut a = mfpl_policy(5, 0.1).unwrap();
            a.reset(seed);
            let tr = run_full_info(&mut a, &m).unwrap();
            let rec = a.fpl_record().unwrap();
            assert!(check_fpl_inequality(&oracle, &tr, &m, Some(&rec)).unwrap().holds);
            assert!(check_btl(&oracle, &tr, &m, &rec, 1e-9).unwrap().holds);
            let mut b = bpr(200, 5, 0.1, Some(3)).unwrap();
            b.reset(seed);
            let tr = run_full_info(&mut b, &m).unwrap();
            let rec = b.fpl_record().unwrap();
            multi_epoch += usize::from(rec.epochs.len() > 1);
            assert!(check_fpl_inequality(&oracle, &tr, &m, Some(&rec)).unwrap().holds);
            assert!(check_btl(&oracle, &tr, &m, &rec, 0.0).unwrap().holds);
        }
        assert!(multi_epoch >= 15);
    }

    #[test]
    fn tampered_trace_fails_leader_match() {
        let m = iid_bernoulli(50, 3, StreamSeed::new(1, 1)).unwrap();
        let mut p = mfpl_policy(3, 0.2).unwrap();
        p.reset(StreamSeed::new(2, 2));
        let tr = run_full_info(&mut p, &m).unwrap();
        let mut rec = p.fpl_record().unwrap();
        // make the first round's played action the worst possible leader
        let mut p1 = vec![0.0; 3];
        p1[tr.actions()[0].index()] = 100.0;
        rec.epochs[0].perturbations[0] = p1;
        let oracle = ExpertOracle { n: 3 };
        let btl = check_btl(&oracle, &tr, &m, &rec, 0.0).unwrap();
        assert!(!btl.leaders_match && !btl.holds);
    }

    #[test]
    fn cpr_inequality_on_top_m() {
        let set = DecisionSet::top_m(6, 2).unwrap();
        let m = iid_bernoulli(100, 6, StreamSeed::new(4, 0)).unwrap();
        let mut p = cpr_policy(set.clone(), None).unwrap();
        p.reset(StreamSeed::new(4, 1));
        let tr = run_linear(&mut p, &set, &m).unwrap();
        let check = check_fpl_inequality(&set, &tr, &m, p.fpl_record().as_ref()).unwrap();
        assert!(check.holds);
        assert!(check.loss_range <= 2.0);
        assert!(check_btl(&set, &tr, &m, &p.fpl_record().unwrap(), 1e-9).unwrap().holds);
    }
}
