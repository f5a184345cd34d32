use std::time::Instant;

use super::{
    check_sizes, Addition, Removal, RemovalReason, SolverConfig, SolverResult, SolverTrace,
    SAMPLE_STREAM,
};
use crate::constraints::IndependenceSystem;
use crate::error::{Error, Result};
use crate::ground::{sample_subset, seeded_rng, ElementId, ElementSet};
use crate::objectives::ValueOracle;

/// Number of thresholds `d(1−ε)^t` that stay at or above `(ε/r)d`, rounded
/// up: `ceil(ln(r/ε) / ln(1/(1−ε)))`.
pub fn max_rounds(r: usize, epsilon: f64) -> u64 {
    let x = (r as f64 / epsilon).ln() / -(-epsilon).ln_1p();
    x.ceil().max(1.0) as u64
}

/// Sampled decreasing-threshold greedy.
///
/// Keeps each element with probability `p`, then sweeps the sample with
/// geometrically decreasing thresholds starting at the best singleton value
/// `d`. In each round an element is dropped once it can no longer be added
/// feasibly, added as soon as its marginal gain reaches the threshold, and
/// dropped for good once its gain falls below `(ε/r)d`. Elements are visited
/// in ascending id order over a snapshot of the survivors taken at the start
/// of the round.
///
/// Returns the empty set when the sample is empty or no sampled singleton
/// has positive value.
pub fn sdtga(
    f: &ValueOracle,
    sys: &IndependenceSystem,
    cfg: &SolverConfig,
) -> Result<SolverResult> {
    let start = Instant::now();
    cfg.validate(sys.extendibility())?;
    check_sizes(f.ground_size(), sys)?;
    let n = sys.ground_size();
    let r = cfg.resolve_r(sys);
    let calls_before = f.call_count();

    let sample = sample_subset(n, cfg.p, &mut seeded_rng(cfg.seed, SAMPLE_STREAM))?;
    let sample_size = sample.len();
    let mut session = f.session();
    let mut feasibility = sys.tracker();
    let mut trace = cfg.trace.then(SolverTrace::default);
    let mut rounds = 0u64;

    let mut survivors: Vec<ElementId> = sample.to_vec();
    let d = survivors
        .iter()
        .map(|&u| session.gain(u))
        .fold(0.0, f64::max);
    if let Some(t) = trace.as_mut() {
        t.d = d;
    }

    if d > 0.0 {
        let floor = cfg.epsilon / r as f64 * d;
        let cap = max_rounds(r, cfg.epsilon);
        let mut theta = d;
        while rounds < cap && theta >= floor && !survivors.is_empty() {
            let round = rounds as usize;
            rounds += 1;
            if let Some(t) = trace.as_mut() {
                t.theta_sequence.push(theta);
            }
            let mut kept = Vec::with_capacity(survivors.len());
            for &u in &survivors {
                let reason = if !feasibility.can_add(u) {
                    RemovalReason::Infeasible
                } else {
                    let gain = session.gain(u);
                    if gain >= theta {
                        session.insert(u);
                        feasibility.add(u);
                        if session.set().len() > r {
                            return Err(Error::Contract(format!(
                                "solution grew past r = {r}; r must bound every independent set"
                            )));
                        }
                        if let Some(t) = trace.as_mut() {
                            t.additions.push(Addition {
                                round,
                                element: u,
                                gain,
                            });
                        }
                        RemovalReason::Added
                    } else if gain < floor {
                        RemovalReason::Negligible
                    } else {
                        kept.push(u);
                        continue;
                    }
                };
                if let Some(t) = trace.as_mut() {
                    t.removals.push(Removal {
                        round,
                        element: u,
                        reason,
                    });
                }
            }
            survivors = kept;
            theta *= 1.0 - cfg.epsilon;
        }
    }

    let solution: ElementSet = session.into_set();
    debug_assert!(sys.is_independent(&solution).unwrap_or(false));
    Ok(SolverResult {
        value: f.peek(&solution),
        solution,
        oracle_calls: f.call_count() - calls_before,
        rounds,
        sample_size,
        r: Some(r),
        elapsed: start.elapsed(),
        trace,
    })
}
