use std::time::Instant;

use super::{check_sizes, SolverResult};
use crate::constraints::{FeasibilityTracker, IndependenceSystem};
use crate::error::{Error, Result};
use crate::ground::ElementSet;
use crate::objectives::{ValueOracle, TOLERANCE};

pub const BRUTE_FORCE_LIMIT: usize = 20;

/// Exact maximum of `f` over all independent sets (`n <= 20`).
///
/// Depth-first enumeration in increasing element order visits sets in
/// lexicographic order; a branch is cut as soon as adding an element breaks
/// independence, since no superset can recover it. On ties (within
/// tolerance) the smallest set wins, then the lexicographically first.
pub fn brute_force_opt(f: &ValueOracle, sys: &IndependenceSystem) -> Result<SolverResult> {
    let start = Instant::now();
    check_sizes(f.ground_size(), sys)?;
    let n = sys.ground_size();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::Capacity {
            what: "brute force",
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let calls_before = f.call_count();
    let mut search = Search {
        f,
        n,
        current: ElementSet::empty(n),
        feasibility: sys.tracker(),
        best: ElementSet::empty(n),
        best_value: f64::NEG_INFINITY,
    };
    search.descend(0)?;
    Ok(SolverResult {
        value: f.peek(&search.best),
        solution: search.best,
        oracle_calls: f.call_count() - calls_before,
        rounds: 0,
        sample_size: n,
        r: None,
        elapsed: start.elapsed(),
        trace: None,
    })
}

struct Search<'a> {
    f: &'a ValueOracle,
    n: usize,
    current: ElementSet,
    feasibility: FeasibilityTracker<'a>,
    best: ElementSet,
    best_value: f64,
}

impl Search<'_> {
    fn descend(&mut self, next: usize) -> Result<()> {
        let value = self.f.eval(&self.current)?;
        let tie = (value - self.best_value).abs() <= TOLERANCE;
        if value > self.best_value + TOLERANCE || (tie && self.current.len() < self.best.len()) {
            self.best_value = value;
            self.best = self.current.clone();
        }
        for u in next..self.n {
            if self.feasibility.can_add(u) {
                self.feasibility.add(u);
                self.current.insert(u);
                self.descend(u + 1)?;
                self.current.remove(u);
                self.feasibility.remove(u);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::constraints::IndependenceFamily;
    use crate::ground::seeded_rng;
    use crate::objectives::{GraphCut, Modular};
    use crate::testing::random_problem;

    #[test]
    fn small_fixtures() {
        let f = ValueOracle::new(Arc::new(Modular::new(vec![10.0, 7.0, 3.0]).unwrap()));
        assert_eq!(
            brute_force_opt(&f, &IndependenceSystem::uniform(3, 2))
                .unwrap()
                .value,
            17.0
        );

        let cut = ValueOracle::new(Arc::new(
            GraphCut::new(3, &[(0, 1, 5.0), (1, 2, 4.0)]).unwrap(),
        ));
        let res = brute_force_opt(&cut, &IndependenceSystem::uniform(3, 3)).unwrap();
        assert_eq!(res.value, 9.0);
        assert_eq!(res.solution.to_vec(), vec![1]);
        assert_eq!(res.oracle_calls, 8);

        let zero = ValueOracle::new(Arc::new(Modular::new(vec![0.0; 4]).unwrap()));
        let res = brute_force_opt(&zero, &IndependenceSystem::uniform(4, 4)).unwrap();
        assert!(res.solution.is_empty());
        assert_eq!(res.value, 0.0);
    }

    #[test]
    fn refuses_large_ground_sets() {
        let f = ValueOracle::new(Arc::new(Modular::new(vec![1.0; 21]).unwrap()));
        assert!(matches!(
            brute_force_opt(&f, &IndependenceSystem::uniform(21, 2)),
            Err(Error::Capacity { n: 21, .. })
        ));
    }

    #[test]
    fn matches_plain_enumeration() {
        for seed in 0..24u64 {
            let mut rng = seeded_rng(seed, 4);
            let n = 10;
            let (f, sys) =
                random_problem((seed % 4) as usize, n, 1 + (seed % 3) as usize, &mut rng);
            let res = brute_force_opt(&f, &sys).unwrap();
            let mut best = (f64::NEG_INFINITY, 0u64);
            for mask in crate::constraints::size_lex_order(n) {
                let s = ElementSet::from_mask(n, mask);
                if sys.admits(&s) {
                    let v = f.peek(&s);
                    if v > best.0 + TOLERANCE {
                        best = (v, mask);
                    }
                }
            }
            assert!((res.value - best.0).abs() <= TOLERANCE);
            assert!(sys.is_independent(&res.solution).unwrap());
        }
    }
}
