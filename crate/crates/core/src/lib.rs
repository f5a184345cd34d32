//! Sampled decreasing-threshold greedy (SDTGA) for maximizing non-negative
//! submodular functions under k-extendible constraints, with greedy and
//! exact baselines, exhaustive property verifiers, and a seeded experiment
//! harness.

pub mod constraints;
pub mod error;
pub mod exec;
pub mod experiment;
pub mod ground;
pub mod instance;
pub mod objectives;
pub mod solvers;

#[cfg(test)]
mod testing;

pub use error::{Error, Result};
pub use exec::Execution;
pub use ground::{sample_subset, seeded_rng, ElementId, ElementSet, RngState};
