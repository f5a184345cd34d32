use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::{brute_force_opt, greedy, sample_greedy, sdtga, SolverConfig, SolverResult};
use crate::constraints::IndependenceSystem;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::ground::{sample_subset, ElementSet, RngState};
use crate::objectives::{SetFunction, ValueOracle};

/// Mean and standard error of a sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    /// Sample standard deviation over `sqrt(count)`; 0 for fewer than two samples.
    pub std_error: f64,
}

impl Moments {
    pub fn from_samples(samples: &[f64]) -> Self {
        let count = samples.len() as u64;
        if count == 0 {
            return Self {
                count,
                mean: f64::NAN,
                std_error: f64::NAN,
            };
        }
        let mean = samples.iter().sum::<f64>() / count as f64;
        let std_error = if count < 2 {
            0.0
        } else {
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
            (var / count as f64).sqrt()
        };
        Self {
            count,
            mean,
            std_error,
        }
    }
}

/// An expectation-level bound checked as `mean − 3·SE ≥ bound`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StatReport {
    pub trials: u64,
    pub mean: f64,
    pub std_error: f64,
    pub bound: f64,
    pub passed: bool,
}

impl StatReport {
    pub fn against(moments: &Moments, bound: f64) -> Self {
        Self {
            trials: moments.count,
            mean: moments.mean,
            std_error: moments.std_error,
            bound,
            passed: moments.mean - 3.0 * moments.std_error >= bound,
        }
    }
}

impl fmt::Display for StatReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "mean {:.4} - 3*SE {:.4} = {:.4} vs bound {:.4} over {} trials",
            self.mean,
            self.std_error,
            self.mean - 3.0 * self.std_error,
            self.bound,
            self.trials
        )
    }
}

/// Monte-Carlo check of `E[h(S)] ≥ (1−p)·h(∅)` for `S` a Bernoulli(p)
/// sample. Sample `i` is drawn from sub-stream `i` of `rng`'s seed.
pub fn sample_bound_check(
    h: &ValueOracle,
    p: f64,
    trials: u64,
    rng: &RngState,
    exec: Execution,
) -> Result<StatReport> {
    if trials < 100 {
        return Err(Error::config(format!(
            "claim check needs at least 100 trials, got {trials}"
        )));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::config(format!(
            "sampling probability {p} outside [0, 1]"
        )));
    }
    let n = h.ground_size();
    let at_empty = h.eval(&ElementSet::empty(n))?;
    let values = exec.try_map(trials, |i| {
        let s = sample_subset(n, p, &mut rng.substream(i))?;
        h.eval(&s)
    })?;
    Ok(StatReport::against(
        &Moments::from_samples(&values),
        (1.0 - p) * at_empty,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Sdtga,
    Greedy,
    SampleGreedy,
    BruteForce,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Sdtga,
        Algorithm::Greedy,
        Algorithm::SampleGreedy,
        Algorithm::BruteForce,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Sdtga => "sdtga",
            Algorithm::Greedy => "greedy",
            Algorithm::SampleGreedy => "sample_greedy",
            Algorithm::BruteForce => "brute_force",
        }
    }

    pub fn is_randomized(self) -> bool {
        matches!(self, Algorithm::Sdtga | Algorithm::SampleGreedy)
    }

    pub fn run(
        self,
        f: &ValueOracle,
        sys: &IndependenceSystem,
        cfg: &SolverConfig,
    ) -> Result<SolverResult> {
        match self {
            Algorithm::Sdtga => sdtga(f, sys, cfg),
            Algorithm::Greedy => greedy(f, sys),
            Algorithm::SampleGreedy => sample_greedy(f, sys, cfg),
            Algorithm::BruteForce => brute_force_opt(f, sys),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::config(format!("unknown algorithm '{s}'")))
    }
}

/// Seed of trial `index` under `master`. Trial 0 runs on the master seed
/// itself, so any recorded trial seed reproduces its row as a single run.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    master.wrapping_add(index)
}

#[derive(Clone, Debug)]
pub struct TrialOutcome {
    pub trial: u64,
    pub seed: u64,
    pub result: SolverResult,
    /// `value / opt` when `opt` is known and positive.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct TrialBatch {
    pub outcomes: Vec<TrialOutcome>,
    pub value: Moments,
    pub ratio: Option<Moments>,
    pub oracle_calls: Moments,
    pub rounds: Moments,
}

impl TrialBatch {
    pub fn ratio_report(&self, bound: f64) -> Option<StatReport> {
        self.ratio.as_ref().map(|m| StatReport::against(m, bound))
    }

    pub fn value_report(&self, bound: f64) -> StatReport {
        StatReport::against(&self.value, bound)
    }
}

/// Runs `trials` independent seeded runs of `algorithm`. Each trial gets its
/// own oracle handle (fresh counter) and seed `trial_seed(cfg.seed, i)`.
pub fn run_trials(
    algorithm: Algorithm,
    objective: &Arc<dyn SetFunction>,
    sys: &IndependenceSystem,
    cfg: &SolverConfig,
    trials: u64,
    opt: Option<f64>,
    exec: Execution,
) -> Result<TrialBatch> {
    if trials == 0 {
        return Err(Error::config("trials must be at least 1"));
    }
    let outcomes = exec.try_map(trials, |trial| {
        let seed = trial_seed(cfg.seed, trial);
        let oracle = ValueOracle::new(Arc::clone(objective));
        let result = algorithm.run(&oracle, sys, &cfg.clone().with_seed(seed))?;
        let ratio = opt.filter(|&o| o > 0.0).map(|o| result.value / o);
        Ok::<_, Error>(TrialOutcome {
            trial,
            seed,
            result,
            ratio,
        })
    })?;
    let collect = |g: &dyn Fn(&TrialOutcome) -> f64| {
        Moments::from_samples(&outcomes.iter().map(g).collect::<Vec<_>>())
    };
    let ratios: Vec<f64> = outcomes.iter().filter_map(|o| o.ratio).collect();
    Ok(TrialBatch {
        value: collect(&|o| o.result.value),
        ratio: (!ratios.is_empty()).then(|| Moments::from_samples(&ratios)),
        oracle_calls: collect(&|o| o.result.oracle_calls as f64),
        rounds: collect(&|o| o.result.rounds as f64),
        outcomes,
    })
}
