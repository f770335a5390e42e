use crate::adversaries::AdaptiveAdversary;
use crate::bandit::BanditPolicy;
use crate::error::{Error, Result};
use crate::experts::{LinearOracle, OnlinePolicy};
use crate::game::{ActionId, LossMatrix, RunTrace};

/// Plays a freshly reset full-information policy against a fixed matrix over
/// an arbitrary linear action set.
pub fn run_linear<O, P>(policy: &mut P, oracle: &O, matrix: &LossMatrix) -> Result<RunTrace<O::Action>>
where
    O: LinearOracle,
    P: OnlinePolicy<Action = O::Action> + ?Sized,
{
    if oracle.dim() != matrix.actions() {
        return Err(Error::DimensionMismatch(format!(
            "matrix has {} columns, action set expects {}",
            matrix.actions(),
            oracle.dim()
        )));
    }
    let mut trace = RunTrace::with_capacity(matrix.rounds());
    for row in matrix.rows() {
        let action = policy.choose()?;
        let epoch = policy.epoch();
        let loss = oracle.value(&action, row);
        trace.push(action, loss, epoch)?;
        policy.observe(row)?;
    }
    Ok(trace)
}

fn check_action(action: ActionId, n: usize, round: usize) -> Result<()> {
    if action.index() >= n {
        return Err(Error::Protocol(format!(
            "round {round}: action {action} outside 1..={n}"
        )));
    }
    Ok(())
}

/// Plays a freshly reset experts policy against a fixed matrix.
pub fn run_full_info<P>(policy: &mut P, matrix: &LossMatrix) -> Result<RunTrace>
where
    P: OnlinePolicy<Action = ActionId> + ?Sized,
{
    let n = matrix.actions();
    let mut trace = RunTrace::with_capacity(matrix.rounds());
    for (t, row) in matrix.rows().enumerate() {
        let action = policy.choose()?;
        check_action(action, n, t + 1)?;
        let epoch = policy.epoch();
        trace.push(action, row[action.index()], epoch)?;
        policy.observe(row)?;
    }
    Ok(trace)
}

/// Interleaves the adversary and the policy for `horizon` rounds and returns
/// the trace together with the realised losses.
pub fn run_adaptive<P, A>(policy: &mut P, adversary: &mut A, horizon: usize) -> Result<(RunTrace, LossMatrix)>
where
    P: OnlinePolicy<Action = ActionId> + ?Sized,
    A: AdaptiveAdversary + ?Sized,
{
    let n = adversary.actions();
    let mut trace = RunTrace::with_capacity(horizon);
    let mut entries = Vec::with_capacity(horizon * n);
    let mut row = vec![0.0; n];
    for t in 0..horizon {
        adversary.losses(trace.actions(), &mut row)?;
        let action = policy.choose()?;
        check_action(action, n, t + 1)?;
        let epoch = policy.epoch();
        trace.push(action, row[action.index()], epoch)?;
        policy.observe(&row)?;
        entries.extend_from_slice(&row);
    }
    Ok((trace, LossMatrix::new(horizon, n, entries)?))
}

/// Plays a freshly reset bandit policy; it sees only its own losses.
pub fn run_bandit<P: BanditPolicy + ?Sized>(policy: &mut P, matrix: &LossMatrix) -> Result<RunTrace> {
    let n = matrix.actions();
    let mut trace = RunTrace::with_capacity(matrix.rounds());
    for (t, row) in matrix.rows().enumerate() {
        let action = policy.choose()?;
        check_action(action, n, t + 1)?;
        let loss = row[action.index()];
        trace.push(action, loss, 1)?;
        policy.observe(loss)?;
    }
    Ok(trace)
}
