//! Solvers: sampled decreasing-threshold greedy, the greedy and sampled
//! greedy baselines, exact enumeration, and the statistics used to check
//! expected-value guarantees.

mod exact;
mod greedy;
mod sdtga;
mod stats;

pub use exact::{brute_force_opt, BRUTE_FORCE_LIMIT};
pub use greedy::{greedy, sample_greedy};
pub use sdtga::{max_rounds, sdtga};
pub use stats::{
    run_trials, sample_bound_check, trial_seed, Algorithm, Moments, StatReport, TrialBatch,
    TrialOutcome,
};

use std::time::Duration;

use crate::constraints::IndependenceSystem;
use crate::error::{Error, Result};
use crate::ground::{ElementId, ElementSet};

/// Stream of the master seed used for the Bernoulli sampling step.
pub const SAMPLE_STREAM: u64 = 0;

/// Where the solution-size bound `r` comes from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RankBound {
    #[default]
    Constraint,
    Override(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub p: f64,
    pub epsilon: f64,
    pub r: RankBound,
    pub seed: u64,
    /// Permits `p > 1/(1+k)` for diagnostic runs.
    pub allow_large_p: bool,
    pub trace: bool,
}

impl SolverConfig {
    pub fn new(p: f64, epsilon: f64) -> Self {
        Self {
            p,
            epsilon,
            r: RankBound::Constraint,
            seed: 0,
            allow_large_p: false,
            trace: false,
        }
    }

    /// `p = 1/(1+k)` for the given system.
    pub fn best_p(sys: &IndependenceSystem, epsilon: f64) -> Self {
        Self::new(1.0 / (1.0 + sys.extendibility() as f64), epsilon)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_r(mut self, r: usize) -> Self {
        self.r = RankBound::Override(r);
        self
    }

    pub fn allowing_large_p(mut self) -> Self {
        self.allow_large_p = true;
        self
    }

    pub fn traced(mut self) -> Self {
        self.trace = true;
        self
    }

    pub(crate) fn check_p(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(Error::config(format!(
                "p must be in (0, 1], got {}",
                self.p
            )));
        }
        Ok(())
    }

    /// Full parameter-domain check for a k-extendible constraint.
    pub fn validate(&self, k: usize) -> Result<()> {
        self.check_p()?;
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::config(format!(
                "epsilon must be > 0, got {}",
                self.epsilon
            )));
        }
        if self.epsilon >= self.p {
            return Err(Error::config(format!(
                "epsilon must be < p (epsilon = {}, p = {})",
                self.epsilon, self.p
            )));
        }
        let best = 1.0 / (1.0 + k as f64);
        if self.p > best + 1e-12 && !self.allow_large_p {
            return Err(Error::config(format!(
                "p = {} exceeds 1/(1+k) = {best} for k = {k}; pass the large-p override to allow it",
                self.p
            )));
        }
        if self.r == RankBound::Override(0) {
            return Err(Error::config("r must be at least 1"));
        }
        Ok(())
    }

    pub fn resolve_r(&self, sys: &IndependenceSystem) -> usize {
        match self.r {
            RankBound::Constraint => sys.rank_upper_bound().max(1),
            RankBound::Override(r) => r,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RemovalReason {
    Infeasible,
    Negligible,
    Added,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Addition {
    pub round: usize,
    pub element: ElementId,
    pub gain: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Removal {
    pub round: usize,
    pub element: ElementId,
    pub reason: RemovalReason,
}

/// Threshold schedule and per-element decisions of one run. Round `i`
/// used threshold `theta_sequence[i]`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolverTrace {
    pub d: f64,
    pub theta_sequence: Vec<f64>,
    pub additions: Vec<Addition>,
    pub removals: Vec<Removal>,
}

#[derive(Clone, Debug)]
pub struct SolverResult {
    pub solution: ElementSet,
    pub value: f64,
    pub oracle_calls: u64,
    /// Outer threshold rounds for SDTGA, selection passes for greedy.
    pub rounds: u64,
    pub sample_size: usize,
    /// Solution-size bound the run used, when it used one.
    pub r: Option<usize>,
    pub elapsed: Duration,
    pub trace: Option<SolverTrace>,
}

fn check_sizes(f_n: usize, sys: &IndependenceSystem) -> Result<()> {
    if f_n != sys.ground_size() {
        return Err(Error::config(format!(
            "objective has {f_n} elements but constraint has {}",
            sys.ground_size()
        )));
    }
    Ok(())
}
