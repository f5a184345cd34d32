//! Non-negative normalized submodular objectives behind a counted value oracle.

mod kinds;
mod oracle;
pub mod plants;
mod verify;

pub(crate) use kinds::build_objective_at;
pub use kinds::{
    build_objective, Coverage, FacilityLocation, GraphCut, Modular, ObjectiveDesc, Shifted,
};
pub use oracle::{MarginalSession, ValueOracle};
pub use verify::{
    verify_monotone, verify_nonneg_normalized, verify_submodularity,
    verify_submodularity_exhaustive, PropertyReport, PropertyWitness, EXHAUSTIVE_CHAIN_LIMIT,
    EXHAUSTIVE_VALUE_LIMIT,
};

use std::fmt::Debug;

use crate::ground::{ElementId, ElementSet};

/// Global comparison tolerance for objective values.
pub const TOLERANCE: f64 = 1e-9;

/// A set function over the ground set `0..ground_size()`.
///
/// Implementations are immutable; evaluation counting happens in
/// [`ValueOracle`], never here.
pub trait SetFunction: Debug + Send + Sync {
    fn ground_size(&self) -> usize;

    /// `f(set)`. Callers guarantee every member is in range.
    fn value(&self, set: &ElementSet) -> f64;

    fn kind(&self) -> &'static str;

    /// True when the function is known to be monotone.
    fn monotone_hint(&self) -> bool {
        false
    }

    /// Incremental marginal-gain state starting at the empty set, if the
    /// function has one. Functions without it fall back to evaluating
    /// `f(S ∪ {u})` against a cached `f(S)`.
    fn gain_tracker(&self) -> Option<Box<dyn GainTracker + '_>> {
        None
    }
}

/// Running state for `Δf(u | S)` queries while `S` grows one element at a time.
pub trait GainTracker {
    /// `f(S ∪ {u}) − f(S)` for `u ∉ S`.
    fn gain(&mut self, u: ElementId) -> f64;
    fn insert(&mut self, u: ElementId);
    /// `f(S)`.
    fn value(&self) -> f64;
    /// Full evaluations performed outside of `gain` since the last call.
    fn take_extra_evaluations(&mut self) -> u64 {
        0
    }
}
