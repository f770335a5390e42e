//! Domain types shared by every game and the functions that score a run.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::util::argmin;

/// An action of the game. Stored zero-based; displayed one-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ActionId(usize);

impl ActionId {
    pub const fn new(index: usize) -> Self {
        ActionId(index)
    }

    /// One-based action number, `1..=n`.
    pub fn from_number(number: usize, actions: usize) -> Result<Self> {
        if number == 0 || number > actions {
            return Err(Error::param(
                "action",
                format!("{number} is outside 1..={actions}"),
            ));
        }
        Ok(ActionId(number - 1))
    }

    pub const fn index(self) -> usize {
        self.0
    }

    pub const fn number(self) -> usize {
        self.0 + 1
    }
}

impl fmt::Display for ActionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

fn check_loss(round: usize, action: usize, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::LossOutOfRange {
            round,
            action,
            value,
        })
    }
}

/// One round's losses, every entry in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossVector(Vec<f64>);

impl LossVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::DimensionMismatch("empty loss vector".into()));
        }
        for (i, &v) in values.iter().enumerate() {
            check_loss(0, i + 1, v)?;
        }
        Ok(LossVector(values))
    }

    pub fn zeros(n: usize) -> Self {
        LossVector(vec![0.0; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Deref for LossVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// The full `T x n` loss table of an oblivious game, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossMatrix {
    rounds: usize,
    actions: usize,
    entries: Vec<f64>,
    best_arm: Option<ActionId>,
}

impl LossMatrix {
    pub fn new(rounds: usize, actions: usize, entries: Vec<f64>) -> Result<Self> {
        if rounds == 0 || actions == 0 {
            return Err(Error::DimensionMismatch(format!(
                "loss matrix needs at least one round and one action, got {rounds} x {actions}"
            )));
        }
        if entries.len() != rounds * actions {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rounds} x {actions} matrix",
                entries.len()
            )));
        }
        for (k, &v) in entries.iter().enumerate() {
            check_loss(k / actions + 1, k % actions + 1, v)?;
        }
        Ok(LossMatrix {
            rounds,
            actions,
            entries,
            best_arm: None,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let actions = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != actions) {
            return Err(Error::DimensionMismatch("ragged loss rows".into()));
        }
        LossMatrix::new(rows.len(), actions, rows.concat())
    }

    /// Records the adversary's designated arm (hidden best or bad arm).
    pub fn with_best_arm(mut self, arm: ActionId) -> Self {
        self.best_arm = Some(arm);
        self
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn actions(&self) -> usize {
        self.actions
    }

    pub fn best_arm(&self) -> Option<ActionId> {
        self.best_arm
    }

    /// Losses of round `t`, zero-based.
    pub fn row(&self, t: usize) -> &[f64] {
        &self.entries[t * self.actions..(t + 1) * self.actions]
    }

    pub fn get(&self, t: usize, action: ActionId) -> f64 {
        self.entries[t * self.actions + action.index()]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks_exact(self.actions)
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Cumulative loss of every action.
    pub fn column_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.actions];
        for row in self.rows() {
            for (s, &v) in sums.iter_mut().zip(row) {
                *s += v;
            }
        }
        sums
    }

    /// Appends an extra action whose loss is 1 in every round.
    pub fn with_reserved_worst_action(&self) -> LossMatrix {
        let mut entries = Vec::with_capacity(self.rounds * (self.actions + 1));
        for row in self.rows() {
            entries.extend_from_slice(row);
            entries.push(1.0);
        }
        LossMatrix {
            rounds: self.rounds,
            actions: self.actions + 1,
            entries,
            best_arm: self.best_arm,
        }
    }
}

/// Per-round record of a played game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace<A = ActionId> {
    actions: Vec<A>,
    losses: Vec<f64>,
    switch_flags: Vec<bool>,
    epoch_ids: Vec<u32>,
}

impl<A> Default for RunTrace<A> {
    fn default() -> Self {
        RunTrace {
            actions: Vec::new(),
            losses: Vec::new(),
            switch_flags: Vec::new(),
            epoch_ids: Vec::new(),
        }
    }
}

impl<A: PartialEq> RunTrace<A> {
    pub fn with_capacity(rounds: usize) -> Self {
        RunTrace {
            actions: Vec::with_capacity(rounds),
            losses: Vec::with_capacity(rounds),
            switch_flags: Vec::with_capacity(rounds),
            epoch_ids: Vec::with_capacity(rounds),
        }
    }

    /// Appends a round. The switch flag is derived from the previous action;
    /// epoch ids must not decrease.
    pub fn push(&mut self, action: A, loss: f64, epoch: u32) -> Result<()> {
        let epoch = epoch.max(1);
        if let Some(&last) = self.epoch_ids.last() {
            if epoch < last {
                return Err(Error::Protocol(format!(
                    "epoch id went from {last} back to {epoch}"
                )));
            }
        }
        let switched = self.actions.last().is_some_and(|prev| *prev != action);
        self.actions.push(action);
        self.losses.push(loss);
        self.switch_flags.push(switched);
        self.epoch_ids.push(epoch);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn actions(&self) -> &[A] {
        &self.actions
    }

    pub fn losses(&self) -> &[f64] {
        &self.losses
    }

    pub fn switch_flags(&self) -> &[bool] {
        &self.switch_flags
    }

    pub fn epoch_ids(&self) -> &[u32] {
        &self.epoch_ids
    }

    pub fn total_loss(&self) -> f64 {
        self.losses.iter().sum()
    }

    /// Number of distinct epochs the run went through.
    pub fn epochs(&self) -> u32 {
        self.epoch_ids.last().copied().unwrap_or(0)
    }

    /// Whether the stored switch flags agree with the action sequence.
    pub fn flags_consistent(&self) -> bool {
        self.switch_flags.first().is_none_or(|f| !f)
            && self
                .actions
                .windows(2)
                .zip(&self.switch_flags[1.min(self.switch_flags.len())..])
                .all(|(w, &f)| (w[0] != w[1]) == f)
    }
}

/// Lowest-index action with the smallest cumulative loss, and that loss.
pub fn best_action_in_hindsight(matrix: &LossMatrix) -> (ActionId, f64) {
    let sums = matrix.column_sums();
    let best = argmin(&sums);
    (ActionId::new(best), sums[best])
}

/// Player's total loss minus the best fixed action's total loss.
pub fn regret_of(trace: &RunTrace, matrix: &LossMatrix) -> Result<f64> {
    if trace.len() != matrix.rounds() {
        return Err(Error::DimensionMismatch(format!(
            "trace has {} rounds, matrix has {}",
            trace.len(),
            matrix.rounds()
        )));
    }
    Ok(trace.total_loss() - best_action_in_hindsight(matrix).1)
}

/// Number of rounds `t >= 2` whose action differs from round `t - 1`.
pub fn switches_of<A: PartialEq>(trace: &RunTrace<A>) -> usize {
    trace.actions().windows(2).filter(|w| w[0] != w[1]).count()
}

/// Regret plus `cost` per switch. Costs below 1 are rejected.
pub fn switching_cost_objective(trace: &RunTrace, matrix: &LossMatrix, cost: f64) -> Result<f64> {
    if !(cost >= 1.0) {
        return Err(Error::param("c", format!("switching cost must be >= 1, got {cost}")));
    }
    Ok(regret_of(trace, matrix)? + cost * switches_of(trace) as f64)
}

/// Largest within-round spread `max_i l_t(i) - min_i l_t(i)` over all rounds.
pub fn loss_range(matrix: &LossMatrix) -> f64 {
    matrix
        .rows()
        .map(|row| {
            let (lo, hi) = row
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                    (lo.min(v), hi.max(v))
                });
            hi - lo
        })
        .fold(0.0, f64::max)
}
