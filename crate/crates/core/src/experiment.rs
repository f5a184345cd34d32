//! Experiment orchestration: parameter sweeps, CSV result rows, and the
//! verification corpus.

use std::fmt;
use std::io::Write;
use std::sync::Arc;

use crate::constraints::{
    intersect, verify_k_extendible, verify_matroid_axioms, Block, IndependenceSystem,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::ground::seeded_rng;
use crate::instance::{
    generate_seeded, random_k_system, random_objective, Family, GenSpec, Problem,
};
use crate::objectives::{
    verify_monotone, verify_nonneg_normalized, verify_submodularity,
    verify_submodularity_exhaustive, GraphCut, Modular, SetFunction, Shifted, ValueOracle,
    EXHAUSTIVE_CHAIN_LIMIT,
};
use crate::solvers::{
    brute_force_opt, run_trials, sample_bound_check, Algorithm, Moments, SolverConfig,
    BRUTE_FORCE_LIMIT,
};

pub const CSV_HEADER: [&str; 12] = [
    "instance",
    "algorithm",
    "p",
    "epsilon",
    "seed",
    "value",
    "opt",
    "ratio",
    "oracle_calls",
    "rounds",
    "sample_size",
    "elapsed_ms",
];

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub algorithms: Vec<Algorithm>,
    pub p_values: Vec<f64>,
    pub epsilon_values: Vec<f64>,
    pub trials: u64,
    pub master_seed: u64,
    pub r_override: Option<usize>,
    pub allow_large_p: bool,
}

impl ExperimentConfig {
    pub fn new(
        algorithms: Vec<Algorithm>,
        p_values: Vec<f64>,
        epsilon_values: Vec<f64>,
        trials: u64,
    ) -> Self {
        Self {
            algorithms,
            p_values,
            epsilon_values,
            trials,
            master_seed: 0,
            r_override: None,
            allow_large_p: false,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn solver_config(&self, p: f64, epsilon: f64) -> SolverConfig {
        let mut cfg = SolverConfig::new(p, epsilon).with_seed(self.master_seed);
        cfg.allow_large_p = self.allow_large_p;
        if let Some(r) = self.r_override {
            cfg = cfg.with_r(r);
        }
        cfg
    }

    /// Checks every sweep point before anything runs.
    pub fn validate(&self, sys: &IndependenceSystem) -> Result<()> {
        if self.algorithms.is_empty() || self.p_values.is_empty() || self.epsilon_values.is_empty()
        {
            return Err(Error::config(
                "sweep needs at least one algorithm, p and epsilon",
            ));
        }
        if self.trials == 0 {
            return Err(Error::config("trials must be at least 1"));
        }
        for &alg in &self.algorithms {
            for &p in &self.p_values {
                for &eps in &self.epsilon_values {
                    let cfg = self.solver_config(p, eps);
                    match alg {
                        Algorithm::Sdtga => cfg.validate(sys.extendibility())?,
                        Algorithm::SampleGreedy => cfg.check_p()?,
                        Algorithm::Greedy | Algorithm::BruteForce => {}
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub instance: String,
    pub algorithm: Algorithm,
    pub p: f64,
    pub epsilon: f64,
    pub seed: u64,
    pub value: f64,
    pub opt: Option<f64>,
    pub ratio: Option<f64>,
    pub oracle_calls: u64,
    pub rounds: u64,
    pub sample_size: usize,
    pub elapsed_ms: f64,
}

impl ResultRow {
    fn fields(&self) -> [String; 12] {
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        [
            self.instance.clone(),
            self.algorithm.to_string(),
            self.p.to_string(),
            self.epsilon.to_string(),
            self.seed.to_string(),
            self.value.to_string(),
            opt(self.opt),
            opt(self.ratio),
            self.oracle_calls.to_string(),
            self.rounds.to_string(),
            self.sample_size.to_string(),
            format!("{:.3}", self.elapsed_ms),
        ]
    }
}

/// Aggregates of one sweep point.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSummary {
    pub algorithm: Algorithm,
    pub p: f64,
    pub epsilon: f64,
    pub trials: u64,
    pub value: Moments,
    pub ratio: Option<Moments>,
    pub oracle_calls: Moments,
    pub rounds: Moments,
}

impl fmt::Display for SweepSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "# summary algorithm={} p={} epsilon={} trials={} mean_value={} se_value={}",
            self.algorithm,
            self.p,
            self.epsilon,
            self.trials,
            self.value.mean,
            self.value.std_error
        )?;
        if let Some(r) = &self.ratio {
            write!(f, " mean_ratio={} se_ratio={}", r.mean, r.std_error)?;
        }
        write!(
            f,
            " mean_oracle_calls={} se_oracle_calls={} mean_rounds={}",
            self.oracle_calls.mean, self.oracle_calls.std_error, self.rounds.mean
        )
    }
}

#[derive(Clone, Debug, Default)]
pub struct BenchOutput {
    pub rows: Vec<ResultRow>,
    pub summaries: Vec<SweepSummary>,
}

/// Known optimum: the instance's recorded value, else brute force when the
/// ground set is small enough, else unknown.
pub fn reference_opt(problem: &Problem) -> Result<Option<f64>> {
    if let Some(opt) = problem.opt_value {
        return Ok(Some(opt));
    }
    if problem.n() > BRUTE_FORCE_LIMIT {
        return Ok(None);
    }
    Ok(Some(
        brute_force_opt(&problem.oracle(), &problem.constraint)?.value,
    ))
}

/// Full sweep `algorithms × p × epsilon × trials`, rows in sweep order then
/// trial order.
pub fn run_experiment(
    problem: &Problem,
    cfg: &ExperimentConfig,
    exec: Execution,
) -> Result<BenchOutput> {
    cfg.validate(&problem.constraint)?;
    if cfg.algorithms.contains(&Algorithm::BruteForce) && problem.n() > BRUTE_FORCE_LIMIT {
        return Err(Error::Capacity {
            what: "brute force",
            n: problem.n(),
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let opt = reference_opt(problem)?;
    let mut out = BenchOutput::default();
    for &algorithm in &cfg.algorithms {
        for &p in &cfg.p_values {
            for &epsilon in &cfg.epsilon_values {
                let solver_cfg = cfg.solver_config(p, epsilon);
                let batch = run_trials(
                    algorithm,
                    &problem.objective,
                    &problem.constraint,
                    &solver_cfg,
                    cfg.trials,
                    opt,
                    exec,
                )?;
                out.rows.extend(batch.outcomes.iter().map(|o| ResultRow {
                    instance: problem.name.clone(),
                    algorithm,
                    p,
                    epsilon,
                    seed: o.seed,
                    value: o.result.value,
                    opt,
                    ratio: o.ratio,
                    oracle_calls: o.result.oracle_calls,
                    rounds: o.result.rounds,
                    sample_size: o.result.sample_size,
                    elapsed_ms: o.result.elapsed.as_secs_f64() * 1e3,
                }));
                out.summaries.push(SweepSummary {
                    algorithm,
                    p,
                    epsilon,
                    trials: cfg.trials,
                    value: batch.value,
                    ratio: batch.ratio,
                    oracle_calls: batch.oracle_calls,
                    rounds: batch.rounds,
                });
            }
        }
    }
    Ok(out)
}

fn io_err(e: impl Into<std::io::Error>) -> Error {
    Error::Io {
        path: "output".into(),
        source: e.into(),
    }
}

/// Writes rows (with the header if `header`) followed by `#` summary lines.
pub fn write_csv<W: Write>(
    mut out: W,
    rows: &[ResultRow],
    summaries: &[SweepSummary],
    header: bool,
) -> Result<()> {
    {
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(&mut out);
        if header {
            w.write_record(CSV_HEADER).map_err(io_err)?;
        }
        for row in rows {
            w.write_record(row.fields()).map_err(io_err)?;
        }
        w.flush().map_err(io_err)?;
    }
    for s in summaries {
        writeln!(out, "{s}").map_err(io_err)?;
    }
    Ok(())
}

pub struct SystemCase {
    pub name: String,
    pub system: IndependenceSystem,
    pub claimed_k: usize,
}

pub struct ObjectiveCase {
    pub name: String,
    pub function: Arc<dyn SetFunction>,
}

/// A non-monotone objective whose optimum under `constraint` anchors the
/// shifted function `h(X) = f(X ∪ OPT)`.
pub struct SampleBoundCase {
    pub name: String,
    pub function: Arc<dyn SetFunction>,
    pub constraint: IndependenceSystem,
}

pub struct Corpus {
    pub systems: Vec<SystemCase>,
    pub objectives: Vec<ObjectiveCase>,
    pub sample_bound_cases: Vec<SampleBoundCase>,
    pub sample_bound_p: Vec<f64>,
    pub sample_bound_trials: u64,
}

/// The shipped verification corpus: every constraint shape and objective
/// kind, all at `n <= 10`.
pub fn builtin_corpus() -> Corpus {
    let mut rng = seeded_rng(2024, 0);
    let block = |members: Vec<usize>, capacity| Block { members, capacity };
    let m1 = IndependenceSystem::partition(3, vec![block(vec![0, 1], 1), block(vec![2], 1)])
        .expect("valid");
    let m2 = IndependenceSystem::partition(3, vec![block(vec![0, 2], 1), block(vec![1], 1)])
        .expect("valid");
    let systems = vec![
        ("uniform-6-r3", IndependenceSystem::uniform(6, 3)),
        ("uniform-10-r4", IndependenceSystem::uniform(10, 4)),
        (
            "partition-10",
            IndependenceSystem::partition(
                10,
                vec![
                    block(vec![0, 1, 2], 1),
                    block(vec![3, 4, 5, 6], 2),
                    block(vec![7, 8, 9], 1),
                ],
            )
            .expect("valid"),
        ),
        ("two-partitions-3", intersect(vec![m1, m2]).expect("valid")),
        ("two-partitions-10", random_k_system(10, 2, 4, &mut rng)),
        ("three-partitions-9", random_k_system(9, 3, 3, &mut rng)),
        (
            "uniform-and-partition-8",
            intersect(vec![
                IndependenceSystem::uniform(8, 3),
                random_k_system(8, 1, 4, &mut rng),
            ])
            .expect("valid"),
        ),
    ];
    let systems = systems
        .into_iter()
        .map(|(name, system)| SystemCase {
            name: name.into(),
            claimed_k: system.extendibility(),
            system,
        })
        .collect();

    let mut objectives = vec![
        ObjectiveCase {
            name: "modular-10-7-3".into(),
            function: Arc::new(Modular::new(vec![10.0, 7.0, 3.0]).expect("valid")),
        },
        ObjectiveCase {
            name: "path-cut".into(),
            function: Arc::new(GraphCut::new(3, &[(0, 1, 5.0), (1, 2, 4.0)]).expect("valid")),
        },
    ];
    for family in Family::ALL {
        objectives.push(ObjectiveCase {
            name: format!("{family}-10"),
            function: random_objective(family, 10, &mut rng),
        });
    }

    let sample_bound_cases = (0..3)
        .map(|seed| {
            let spec = generate_seeded(
                &GenSpec::new(Family::RandomCut, 10).with_k(2).with_rank(3),
                seed,
            )
            .expect("valid generator spec");
            let problem = spec.build().expect("generated instances are valid");
            SampleBoundCase {
                name: spec.name,
                function: problem.objective,
                constraint: problem.constraint,
            }
        })
        .collect();

    Corpus {
        systems,
        objectives,
        sample_bound_cases,
        sample_bound_p: vec![0.25, 1.0 / 3.0, 0.5],
        sample_bound_trials: 10_000,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub subject: String,
    pub check: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "{status} {} {}: {}",
            self.check, self.subject, self.detail
        )
    }
}

#[derive(Clone, Debug, Default)]
pub struct VerifyReport {
    pub outcomes: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.outcomes.iter().filter(|o| !o.passed)
    }

    fn push(&mut self, subject: &str, check: &'static str, passed: bool, detail: String) {
        self.outcomes.push(CheckOutcome {
            subject: subject.to_owned(),
            check,
            passed,
            detail,
        });
    }
}

/// Runs every verifier over the corpus. Capacity refusals are errors, not
/// failed checks.
pub fn verify_corpus(
    corpus: &Corpus,
    exhaustive: bool,
    seed: u64,
    exec: Execution,
) -> Result<VerifyReport> {
    let mut report = VerifyReport::default();
    let mut rng = seeded_rng(seed, 0);

    for case in &corpus.systems {
        if case.system.is_matroid() {
            let r = verify_matroid_axioms(&case.system)?;
            let detail = match &r.counterexample {
                Some(w) => w.to_string(),
                None => format!("{} checks", r.checks_performed),
            };
            report.push(&case.name, "matroid-axioms", r.passed, detail);
        }
        let r = verify_k_extendible(&case.system, case.claimed_k)?;
        let detail = match &r.counterexample {
            Some(w) => format!("k={}: {w}", case.claimed_k),
            None => format!("k={}: {} checks", case.claimed_k, r.checks_performed),
        };
        report.push(&case.name, "k-extendible", r.passed, detail);
    }

    for case in &corpus.objectives {
        let f = ValueOracle::new(Arc::clone(&case.function));
        let small = f.ground_size() <= EXHAUSTIVE_CHAIN_LIMIT;
        let r = verify_nonneg_normalized(&f, 1000, &mut rng)?;
        report.push(&case.name, "nonneg-normalized", r.passed, describe(&r));
        let r = if exhaustive && small {
            verify_submodularity_exhaustive(&f)?
        } else {
            verify_submodularity(&f, 1000, &mut rng)?
        };
        report.push(&case.name, "submodularity", r.passed, describe(&r));
        if f.monotone_hint() && small {
            let r = verify_monotone(&f)?;
            report.push(&case.name, "monotone", r.passed, describe(&r));
        }
    }

    for (i, case) in corpus.sample_bound_cases.iter().enumerate() {
        let f = ValueOracle::new(Arc::clone(&case.function));
        let opt = brute_force_opt(&f, &case.constraint)?.solution;
        let h = ValueOracle::new(Arc::new(Shifted::new(Arc::clone(&case.function), opt)?));
        for (j, &p) in corpus.sample_bound_p.iter().enumerate() {
            let stream_rng = seeded_rng(seed, 1 + (i * corpus.sample_bound_p.len() + j) as u64);
            let r = sample_bound_check(&h, p, corpus.sample_bound_trials, &stream_rng, exec)?;
            report.push(
                &case.name,
                "sample-bound",
                r.passed,
                format!("p={p:.4}: {r}"),
            );
        }
    }
    Ok(report)
}

fn describe(r: &crate::objectives::PropertyReport) -> String {
    match &r.witness {
        Some(w) => format!("worst slack {:.3e}, first witness {w}", r.worst_violation),
        None => format!("{} checks, worst slack {:.3e}", r.trials, r.worst_violation),
    }
}
