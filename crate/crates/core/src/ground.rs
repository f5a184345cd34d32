//! Ground sets, seeded randomness and Bernoulli sampling.
//!
//! Ground sets are always the dense range `0..n`. Sets over a ground set are
//! stored as bitsets so membership tests stay constant time at large `n`.

use std::fmt;

use fixedbitset::FixedBitSet;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Index of an element of the ground set `0..n`.
pub type ElementId = usize;

/// A subset of the ground set `0..n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ElementSet {
    bits: FixedBitSet,
    len: usize,
}

impl ElementSet {
    pub fn empty(n: usize) -> Self {
        Self {
            bits: FixedBitSet::with_capacity(n),
            len: 0,
        }
    }

    pub fn full(n: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(n);
        bits.insert_range(..);
        Self { bits, len: n }
    }

    /// Builds a set from ids, rejecting anything outside `0..n`. Duplicates
    /// collapse.
    pub fn from_ids<I: IntoIterator<Item = ElementId>>(n: usize, ids: I) -> Result<Self> {
        let mut set = Self::empty(n);
        for id in ids {
            if id >= n {
                return Err(Error::Domain { element: id, n });
            }
            set.insert(id);
        }
        Ok(set)
    }

    /// Set whose members are the one bits of `mask` (only meaningful for `n <= 64`).
    pub fn from_mask(n: usize, mask: u64) -> Self {
        debug_assert!(n <= 64);
        let mut set = Self::empty(n);
        for i in 0..n {
            if mask >> i & 1 == 1 {
                set.insert(i);
            }
        }
        set
    }

    pub fn to_mask(&self) -> u64 {
        self.iter().fold(0u64, |m, i| m | 1 << i)
    }

    /// Size of the owning ground set.
    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, id: ElementId) -> bool {
        self.bits.contains(id)
    }

    /// Inserts `id`, returning whether it was newly added. Panics if `id >= n`.
    pub fn insert(&mut self, id: ElementId) -> bool {
        let fresh = !self.bits.put(id);
        self.len += fresh as usize;
        fresh
    }

    pub fn remove(&mut self, id: ElementId) -> bool {
        let present = self.bits.contains(id);
        if present {
            self.bits.set(id, false);
            self.len -= 1;
        }
        present
    }

    /// `self ∪ {id}` as a new set.
    pub fn with(&self, id: ElementId) -> Self {
        let mut out = self.clone();
        out.insert(id);
        out
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut bits = self.bits.clone();
        bits.union_with(&other.bits);
        let len = bits.count_ones(..);
        Self { bits, len }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.bits.is_subset(&other.bits)
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = ElementId> + '_ {
        self.bits.ones()
    }

    pub fn to_vec(&self) -> Vec<ElementId> {
        self.iter().collect()
    }

    /// Fails if any member is outside `0..n`.
    pub fn check_within(&self, n: usize) -> Result<()> {
        match self.iter().find(|&i| i >= n) {
            Some(element) => Err(Error::Domain { element, n }),
            None => Ok(()),
        }
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, id) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{id}")?;
        }
        write!(f, "}}")
    }
}

/// Deterministic generator identified by a `(seed, stream)` pair.
///
/// Backed by ChaCha8, whose output is fixed by the algorithm definition, so
/// draws are identical across runs and platforms. Distinct streams of one
/// seed are independent keystreams.
#[derive(Clone, Debug)]
pub struct RngState {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RngState {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Fresh generator on sub-stream `stream` of this generator's seed.
    pub fn substream(&self, stream: u64) -> RngState {
        seeded_rng(self.seed, stream)
    }
}

impl RngCore for RngState {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

pub fn seeded_rng(seed: u64, stream: u64) -> RngState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    RngState { seed, stream, rng }
}

/// Includes each element of `0..n` independently with probability `p`.
///
/// One uniform draw is consumed per element regardless of `p`, so the
/// generator advances by the same amount for every call with the same `n`.
pub fn sample_subset(n: usize, p: f64, rng: &mut RngState) -> Result<ElementSet> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::config(format!(
            "sampling probability {p} outside [0, 1]"
        )));
    }
    let mut set = ElementSet::empty(n);
    for u in 0..n {
        let draw: f64 = rng.random();
        if draw < p {
            set.insert(u);
        }
    }
    Ok(set)
}
