//! Online combinatorial optimisation over `m`-sparse binary vectors.
//!
//! A round's loss is linear, `l_t . v`, and the learners are perturbed
//! leaders that only touch the decision set through its minimisation oracle.

mod learners;
mod set;

pub use learners::{
    bcpr, bcpr_quota, comb_best_in_hindsight, comb_loss_range, comb_regret, cpr_policy,
    default_eta, BCPR_QUOTA_CONST,
};
pub use set::{brute_force_oracle, parse_vertices, topm_oracle, write_vertices, DecisionSet, Vertex};
