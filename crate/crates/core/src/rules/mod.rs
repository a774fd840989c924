//! Local inference rules.

mod bg;
mod conj;
mod indep;
mod qs;

pub use bg::{bg_tighten, cycle_check, ArcWeightGraph, CycleCheck, LongestPaths, EPS_CYCLE};
pub use conj::{
    a_or_b_given_c_closed_form, ab_given_c_closed_form, c_given_a_or_b_closed_form, c_given_ab_closed_form,
    conj_query_bounds, disj_membership, ConjDirection,
};
pub use indep::{corner_extremes, indep_bounds, indep_pass, indep_tighten};
pub use qs::{qs_bounds, qs_pass, qs_sweep};

/// Smallest endpoint movement that counts as a change.
pub const EPS_CHANGE: f64 = 1e-9;
