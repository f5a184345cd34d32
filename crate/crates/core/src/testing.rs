//! Test-only fixtures.

use std::sync::Arc;

use rand::Rng;

use crate::constraints::IndependenceSystem;
use crate::ground::RngState;
use crate::instance::{self, Family};
use crate::objectives::{SetFunction, ValueOracle};

pub use crate::instance::random_partition;
pub use crate::objectives::plants::{NegativeSingletons, SquaredSize};

/// 0 modular, 1 coverage, 2 facility location, 3 graph cut.
pub fn random_objective(kind: usize, n: usize, rng: &mut RngState) -> Arc<dyn SetFunction> {
    let family = [
        Family::RandomModular,
        Family::RandomCoverage,
        Family::RandomFacilityLocation,
        Family::RandomCut,
    ][kind];
    instance::random_objective(family, n, rng)
}

pub fn random_problem(
    kind: usize,
    n: usize,
    k: usize,
    rng: &mut RngState,
) -> (ValueOracle, IndependenceSystem) {
    let f = ValueOracle::new(random_objective(kind, n, rng));
    let rank = rng.random_range(1..=(n / 2).max(1));
    (f, instance::random_k_system(n, k, rank, rng))
}
