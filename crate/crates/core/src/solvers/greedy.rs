use std::time::Instant;

use super::{check_sizes, SolverConfig, SolverResult, SAMPLE_STREAM};
use crate::constraints::IndependenceSystem;
use crate::error::Result;
use crate::ground::{sample_subset, seeded_rng, ElementId, ElementSet};
use crate::objectives::ValueOracle;

/// Classic greedy: repeatedly add the feasible element with the largest
/// positive marginal gain, smallest id on ties.
pub fn greedy(f: &ValueOracle, sys: &IndependenceSystem) -> Result<SolverResult> {
    check_sizes(f.ground_size(), sys)?;
    let n = sys.ground_size();
    greedy_over(f, sys, (0..n).collect(), n, Instant::now())
}

/// Greedy restricted to a Bernoulli(p) sample of the ground set, drawn from
/// the same stream SDTGA uses for the same seed.
pub fn sample_greedy(
    f: &ValueOracle,
    sys: &IndependenceSystem,
    cfg: &SolverConfig,
) -> Result<SolverResult> {
    let start = Instant::now();
    cfg.check_p()?;
    check_sizes(f.ground_size(), sys)?;
    let sample = sample_subset(
        sys.ground_size(),
        cfg.p,
        &mut seeded_rng(cfg.seed, SAMPLE_STREAM),
    )?;
    let size = sample.len();
    greedy_over(f, sys, sample.to_vec(), size, start)
}

fn greedy_over(
    f: &ValueOracle,
    sys: &IndependenceSystem,
    mut candidates: Vec<ElementId>,
    sample_size: usize,
    start: Instant,
) -> Result<SolverResult> {
    let calls_before = f.call_count();
    let mut session = f.session();
    let mut feasibility = sys.tracker();
    let mut rounds = 0;
    loop {
        // once infeasible, always infeasible
        candidates.retain(|&u| feasibility.can_add(u));
        if candidates.is_empty() {
            break;
        }
        rounds += 1;
        let mut best: Option<(usize, f64)> = None;
        for (i, &u) in candidates.iter().enumerate() {
            let gain = session.gain(u);
            if best.is_none_or(|(_, g)| gain > g) {
                best = Some((i, gain));
            }
        }
        match best {
            Some((i, gain)) if gain > 0.0 => {
                let u = candidates.remove(i);
                session.insert(u);
                feasibility.add(u);
            }
            _ => break,
        }
    }
    let solution: ElementSet = session.into_set();
    Ok(SolverResult {
        value: f.peek(&solution),
        solution,
        oracle_calls: f.call_count() - calls_before,
        rounds,
        sample_size,
        r: None,
        elapsed: start.elapsed(),
        trace: None,
    })
}
