//! Exhaustive checks of the matroid axioms and of k-extendibility on small
//! ground sets.
//!
//! Sets are enumerated by size, then lexicographically by their sorted
//! members, so the first counterexample reported is deterministic.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::ground::ElementSet;

pub const MATROID_AXIOM_LIMIT: usize = 14;
pub const K_EXTENDIBLE_LIMIT: usize = 12;

/// Anything that can say whether a set is independent.
pub trait IndependenceFamily {
    fn ground_size(&self) -> usize;
    /// Membership test; `set` is assumed to lie in `0..ground_size()`.
    fn admits(&self, set: &ElementSet) -> bool;
}

/// An independence family given by listing its sets.
#[derive(Clone, Debug)]
pub struct ExplicitFamily {
    n: usize,
    sets: HashSet<u64>,
}

impl ExplicitFamily {
    pub fn new<I, S>(n: usize, sets: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: IntoIterator<Item = usize>,
    {
        if n > 64 {
            return Err(Error::Capacity {
                what: "explicit family",
                n,
                limit: 64,
            });
        }
        let sets = sets
            .into_iter()
            .map(|s| ElementSet::from_ids(n, s).map(|s| s.to_mask()))
            .collect::<Result<_>>()?;
        Ok(Self { n, sets })
    }
}

impl IndependenceFamily for ExplicitFamily {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn admits(&self, set: &ElementSet) -> bool {
        self.sets.contains(&set.to_mask())
    }
}

/// A witness that a family violates one of the checked properties.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxiomWitness {
    EmptySetDependent,
    /// `subset ⊂ set`, `set` independent, `subset` not.
    NotDownwardClosed {
        set: ElementSet,
        subset: ElementSet,
    },
    /// `|a| < |b|`, both independent, no `u ∈ b \ a` keeps `a ∪ {u}` independent.
    NoExchange {
        a: ElementSet,
        b: ElementSet,
    },
    /// `b` extends `a`, `a ∪ {u}` independent, yet no `X ⊆ b \ a` of size at most
    /// k makes `(b \ X) ∪ {u}` independent.
    NotExtendible {
        a: ElementSet,
        b: ElementSet,
        u: usize,
    },
}

impl fmt::Display for AxiomWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomWitness::EmptySetDependent => write!(f, "empty set is not independent"),
            AxiomWitness::NotDownwardClosed { set, subset } => {
                write!(f, "{set} independent but its subset {subset} is not")
            }
            AxiomWitness::NoExchange { a, b } => {
                write!(f, "exchange fails for A={a}, B={b}")
            }
            AxiomWitness::NotExtendible { a, b, u } => {
                write!(f, "extension fails for A={a}, B={b}, u={u}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    pub passed: bool,
    pub counterexample: Option<AxiomWitness>,
    pub checks_performed: u64,
}

impl AxiomReport {
    fn finish(checks_performed: u64, counterexample: Option<AxiomWitness>) -> Self {
        Self {
            passed: counterexample.is_none(),
            counterexample,
            checks_performed,
        }
    }
}

/// All subsets of `0..n` as bitmasks, ordered by size then lexicographically.
pub fn size_lex_order(n: usize) -> Vec<u64> {
    assert!(n < 64);
    let mut masks: Vec<u64> = (0..1u64 << n).collect();
    masks.sort_by_cached_key(|&m| {
        let members: Vec<u32> = (0..n as u32).filter(|&i| m >> i & 1 == 1).collect();
        (m.count_ones(), members)
    });
    masks
}

/// Independent sets of `family` in enumeration order, plus a mask lookup table.
fn independent_sets<F: IndependenceFamily + ?Sized>(family: &F) -> (Vec<u64>, Vec<bool>) {
    let n = family.ground_size();
    let mut table = vec![false; 1 << n];
    for (mask, slot) in table.iter_mut().enumerate() {
        *slot = family.admits(&ElementSet::from_mask(n, mask as u64));
    }
    let order = size_lex_order(n)
        .into_iter()
        .filter(|&m| table[m as usize])
        .collect();
    (order, table)
}

fn refuse(what: &'static str, n: usize, limit: usize) -> Result<()> {
    if n > limit {
        Err(Error::Capacity { what, n, limit })
    } else {
        Ok(())
    }
}

/// Checks the three matroid axioms by full enumeration (`n <= 14`).
///
/// Downward closure is checked through single-element removals, which is
/// equivalent to checking every subset.
pub fn verify_matroid_axioms<F: IndependenceFamily + ?Sized>(family: &F) -> Result<AxiomReport> {
    let n = family.ground_size();
    refuse("matroid axiom check", n, MATROID_AXIOM_LIMIT)?;
    let (independent, table) = independent_sets(family);
    let set = |m: u64| ElementSet::from_mask(n, m);
    let mut checks = 1u64;

    if !table[0] {
        return Ok(AxiomReport::finish(
            checks,
            Some(AxiomWitness::EmptySetDependent),
        ));
    }

    for &b in &independent {
        for i in 0..n {
            if b >> i & 1 == 1 {
                checks += 1;
                let a = b & !(1 << i);
                if !table[a as usize] {
                    let witness = AxiomWitness::NotDownwardClosed {
                        set: set(b),
                        subset: set(a),
                    };
                    return Ok(AxiomReport::finish(checks, Some(witness)));
                }
            }
        }
    }

    for &a in &independent {
        for &b in &independent {
            if a.count_ones() >= b.count_ones() {
                continue;
            }
            checks += 1;
            let mut diff = b & !a;
            let mut exchanged = false;
            while diff != 0 {
                let u = diff.trailing_zeros();
                diff &= diff - 1;
                if table[(a | 1 << u) as usize] {
                    exchanged = true;
                    break;
                }
            }
            if !exchanged {
                let witness = AxiomWitness::NoExchange {
                    a: set(a),
                    b: set(b),
                };
                return Ok(AxiomReport::finish(checks, Some(witness)));
            }
        }
    }
    Ok(AxiomReport::finish(checks, None))
}

/// Checks k-extendibility by full enumeration (`n <= 12`).
///
/// For every independent `A`, every strict independent superset `B`, and
/// every `u ∉ B` with `A ∪ {u}` independent, some `X ⊆ B \ A` with `|X| <= k`
/// must leave `(B \ X) ∪ {u}` independent. Elements `u ∈ B \ A` are skipped:
/// for them `X = ∅` already works because `B` itself is independent.
pub fn verify_k_extendible<F: IndependenceFamily + ?Sized>(
    family: &F,
    k: usize,
) -> Result<AxiomReport> {
    let n = family.ground_size();
    refuse("k-extendibility check", n, K_EXTENDIBLE_LIMIT)?;
    let (independent, table) = independent_sets(family);
    let set = |m: u64| ElementSet::from_mask(n, m);
    let mut checks = 0u64;

    for &a in &independent {
        for &b in &independent {
            if b == a || b & a != a {
                continue;
            }
            let spare = b & !a;
            for u in 0..n {
                let bit = 1u64 << u;
                if b & bit != 0 || !table[(a | bit) as usize] {
                    continue;
                }
                checks += 1;
                if !has_small_repair(&table, b, spare, bit, k) {
                    let witness = AxiomWitness::NotExtendible {
                        a: set(a),
                        b: set(b),
                        u,
                    };
                    return Ok(AxiomReport::finish(checks, Some(witness)));
                }
            }
        }
    }
    Ok(AxiomReport::finish(checks, None))
}

fn has_small_repair(table: &[bool], b: u64, spare: u64, bit: u64, k: usize) -> bool {
    // iterate submasks of `spare`, including the empty one
    let mut x = spare;
    loop {
        if x.count_ones() as usize <= k && table[((b & !x) | bit) as usize] {
            return true;
        }
        if x == 0 {
            return false;
        }
        x = (x - 1) & spare;
    }
}
