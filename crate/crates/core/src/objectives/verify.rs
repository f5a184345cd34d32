//! Property checks for submodularity, normalization, non-negativity and
//! monotonicity. Small ground sets are checked exhaustively; larger ones by
//! sampling.

use std::fmt;

use rand::Rng;

use super::{ValueOracle, TOLERANCE};
use crate::constraints::size_lex_order;
use crate::error::{Error, Result};
use crate::ground::{ElementSet, RngState};

/// Largest n for which diminishing returns and monotonicity are enumerated.
pub const EXHAUSTIVE_CHAIN_LIMIT: usize = 12;
/// Largest n for which every set is evaluated in the non-negativity check.
pub const EXHAUSTIVE_VALUE_LIMIT: usize = 14;

#[derive(Clone, Debug, PartialEq)]
pub enum PropertyWitness {
    /// `A ⊆ B`, `u ∉ B`.
    Chain {
        a: ElementSet,
        b: ElementSet,
        u: usize,
    },
    Set(ElementSet),
}

impl fmt::Display for PropertyWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropertyWitness::Chain { a, b, u } => write!(f, "A={a}, B={b}, u={u}"),
            PropertyWitness::Set(s) => write!(f, "S={s}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropertyReport {
    pub passed: bool,
    pub trials: u64,
    /// Smallest slack observed; negative values are violations.
    pub worst_violation: f64,
    /// First violation found, in enumeration or sampling order.
    pub witness: Option<PropertyWitness>,
}

struct Tally {
    trials: u64,
    worst: f64,
    witness: Option<PropertyWitness>,
}

impl Tally {
    fn new() -> Self {
        Self {
            trials: 0,
            worst: 0.0,
            witness: None,
        }
    }

    fn record(&mut self, slack: f64, witness: impl FnOnce() -> PropertyWitness) {
        self.trials += 1;
        self.worst = self.worst.min(slack);
        if slack < -TOLERANCE && self.witness.is_none() {
            self.witness = Some(witness());
        }
    }

    fn report(self) -> PropertyReport {
        PropertyReport {
            passed: self.worst >= -TOLERANCE,
            trials: self.trials,
            worst_violation: self.worst,
            witness: self.witness,
        }
    }
}

/// `f` on every subset of `0..n`, indexed by bitmask.
fn value_table(f: &ValueOracle) -> Result<Vec<f64>> {
    let n = f.ground_size();
    (0..1u64 << n)
        .map(|m| f.eval(&ElementSet::from_mask(n, m)))
        .collect()
}

fn limit(what: &'static str, n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::Capacity { what, n, limit });
    }
    Ok(())
}

/// Samples chains `A ⊆ B`, `u ∉ B` and checks `Δf(u|A) ≥ Δf(u|B)`.
pub fn verify_submodularity(
    f: &ValueOracle,
    trials: u64,
    rng: &mut RngState,
) -> Result<PropertyReport> {
    if trials == 0 {
        return Err(Error::config("trials must be at least 1"));
    }
    let n = f.ground_size();
    let mut tally = Tally::new();
    if n == 0 {
        return Ok(tally.report());
    }
    while tally.trials < trials {
        let u = rng.random_range(0..n);
        let density: f64 = rng.random();
        let mut b = ElementSet::empty(n);
        let mut a = ElementSet::empty(n);
        for v in (0..n).filter(|&v| v != u) {
            if rng.random_bool(density) {
                b.insert(v);
                if rng.random_bool(0.5) {
                    a.insert(v);
                }
            }
        }
        let slack = f.marginal_gain(u, &a)? - f.marginal_gain(u, &b)?;
        tally.record(slack, || PropertyWitness::Chain { a, b, u });
    }
    Ok(tally.report())
}

/// Checks diminishing returns on every chain `A ⊆ B`, `u ∉ B` (`n <= 12`).
pub fn verify_submodularity_exhaustive(f: &ValueOracle) -> Result<PropertyReport> {
    let n = f.ground_size();
    limit("exhaustive submodularity check", n, EXHAUSTIVE_CHAIN_LIMIT)?;
    let table = value_table(f)?;
    let order = size_lex_order(n);
    let mut tally = Tally::new();
    for &a in &order {
        for &b in order.iter().filter(|&&b| b & a == a) {
            for u in (0..n).filter(|&u| b >> u & 1 == 0) {
                let bit = 1u64 << u;
                let gain_a = table[(a | bit) as usize] - table[a as usize];
                let gain_b = table[(b | bit) as usize] - table[b as usize];
                tally.record(gain_a - gain_b, || PropertyWitness::Chain {
                    a: ElementSet::from_mask(n, a),
                    b: ElementSet::from_mask(n, b),
                    u,
                });
            }
        }
    }
    Ok(tally.report())
}

/// Checks `f(∅) = 0` and `f(S) ≥ 0`; exhaustive for `n <= 14`, otherwise on
/// `trials` random sets.
pub fn verify_nonneg_normalized(
    f: &ValueOracle,
    trials: u64,
    rng: &mut RngState,
) -> Result<PropertyReport> {
    if trials == 0 {
        return Err(Error::config("trials must be at least 1"));
    }
    let n = f.ground_size();
    let mut tally = Tally::new();
    let empty = ElementSet::empty(n);
    let at_empty = f.eval(&empty)?;
    tally.record(-at_empty.abs(), || PropertyWitness::Set(empty));

    let mut check = |s: ElementSet| -> Result<()> {
        let v = f.eval(&s)?;
        tally.record(v, || PropertyWitness::Set(s));
        Ok(())
    };
    if n <= EXHAUSTIVE_VALUE_LIMIT {
        for mask in size_lex_order(n).into_iter().skip(1) {
            check(ElementSet::from_mask(n, mask))?;
        }
    } else {
        for _ in 0..trials {
            let density: f64 = rng.random();
            let mut s = ElementSet::empty(n);
            for u in 0..n {
                if rng.random_bool(density) {
                    s.insert(u);
                }
            }
            check(s)?;
        }
    }
    Ok(tally.report())
}

/// Checks `f(A) ≤ f(A ∪ {u})` for every `A` and `u ∉ A` (`n <= 12`), which
/// is equivalent to monotonicity over all chains.
pub fn verify_monotone(f: &ValueOracle) -> Result<PropertyReport> {
    let n = f.ground_size();
    limit("exhaustive monotonicity check", n, EXHAUSTIVE_CHAIN_LIMIT)?;
    let table = value_table(f)?;
    let mut tally = Tally::new();
    for a in size_lex_order(n) {
        for u in (0..n).filter(|&u| a >> u & 1 == 0) {
            let b = a | 1 << u;
            tally.record(table[b as usize] - table[a as usize], || {
                PropertyWitness::Chain {
                    a: ElementSet::from_mask(n, a),
                    b: ElementSet::from_mask(n, b),
                    u,
                }
            });
        }
    }
    Ok(tally.report())
}
