//! Independence systems: uniform and partition matroids and their
//! intersections, which are k-extendible for k equal to the number of
//! intersected matroids.

mod verify;

pub use verify::{
    size_lex_order, verify_k_extendible, verify_matroid_axioms, AxiomReport, AxiomWitness,
    ExplicitFamily, IndependenceFamily, K_EXTENDIBLE_LIMIT, MATROID_AXIOM_LIMIT,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ground::{ElementId, ElementSet};

/// One block of a partition matroid: at most `capacity` of `members` may be chosen.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub members: Vec<ElementId>,
    pub capacity: usize,
}

/// Serializable constraint description, as found in instance files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstraintDesc {
    Uniform { r: usize },
    Partition { blocks: Vec<Block> },
    Intersection { members: Vec<ConstraintDesc> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartitionMatroid {
    n: usize,
    blocks: Vec<Block>,
    block_of: Vec<usize>,
}

impl PartitionMatroid {
    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block_of(&self, u: ElementId) -> usize {
        self.block_of[u]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum IndependenceSystem {
    Uniform {
        n: usize,
        capacity: usize,
    },
    Partition(PartitionMatroid),
    /// Conjunction of matroids over one ground set. Never nested.
    Intersection {
        n: usize,
        members: Vec<IndependenceSystem>,
    },
}

impl IndependenceSystem {
    pub fn uniform(n: usize, capacity: usize) -> Self {
        IndependenceSystem::Uniform { n, capacity }
    }

    /// Partition matroid; blocks must be disjoint and cover `0..n`.
    pub fn partition(n: usize, blocks: Vec<Block>) -> Result<Self> {
        Self::partition_at(n, blocks, "blocks")
    }

    fn partition_at(n: usize, blocks: Vec<Block>, field: &str) -> Result<Self> {
        const UNASSIGNED: usize = usize::MAX;
        let mut block_of = vec![UNASSIGNED; n];
        for (b, block) in blocks.iter().enumerate() {
            for (j, &u) in block.members.iter().enumerate() {
                if u >= n {
                    return Err(Error::validation(
                        format!("{field}[{b}].members[{j}]"),
                        format!("element {u} out of range for n = {n}"),
                    ));
                }
                if block_of[u] != UNASSIGNED {
                    return Err(Error::validation(field, format!("blocks overlap at {u}")));
                }
                block_of[u] = b;
            }
        }
        if let Some(u) = block_of.iter().position(|&b| b == UNASSIGNED) {
            return Err(Error::validation(
                field,
                format!("element {u} is in no block"),
            ));
        }
        Ok(IndependenceSystem::Partition(PartitionMatroid {
            n,
            blocks,
            block_of,
        }))
    }

    pub fn from_desc(desc: &ConstraintDesc, n: usize) -> Result<Self> {
        Self::from_desc_at(desc, n, "constraint")
    }

    fn from_desc_at(desc: &ConstraintDesc, n: usize, field: &str) -> Result<Self> {
        match desc {
            ConstraintDesc::Uniform { r } => Ok(Self::uniform(n, *r)),
            ConstraintDesc::Partition { blocks } => {
                Self::partition_at(n, blocks.clone(), &format!("{field}.blocks"))
            }
            ConstraintDesc::Intersection { members } => {
                if members.is_empty() {
                    return Err(Error::validation(
                        format!("{field}.members"),
                        "empty intersection",
                    ));
                }
                let built = members
                    .iter()
                    .enumerate()
                    .map(|(i, m)| Self::from_desc_at(m, n, &format!("{field}.members[{i}]")))
                    .collect::<Result<Vec<_>>>()?;
                intersect(built)
            }
        }
    }

    pub fn to_desc(&self) -> ConstraintDesc {
        match self {
            IndependenceSystem::Uniform { capacity, .. } => {
                ConstraintDesc::Uniform { r: *capacity }
            }
            IndependenceSystem::Partition(pm) => ConstraintDesc::Partition {
                blocks: pm.blocks.clone(),
            },
            IndependenceSystem::Intersection { members, .. } => ConstraintDesc::Intersection {
                members: members.iter().map(Self::to_desc).collect(),
            },
        }
    }

    pub fn ground_size(&self) -> usize {
        match self {
            IndependenceSystem::Uniform { n, .. } | IndependenceSystem::Intersection { n, .. } => {
                *n
            }
            IndependenceSystem::Partition(pm) => pm.n,
        }
    }

    pub fn is_independent(&self, set: &ElementSet) -> Result<bool> {
        set.check_within(self.ground_size())?;
        Ok(self.admits_unchecked(set))
    }

    fn admits_unchecked(&self, set: &ElementSet) -> bool {
        match self {
            IndependenceSystem::Uniform { capacity, .. } => set.len() <= *capacity,
            IndependenceSystem::Partition(pm) => {
                let mut counts = vec![0usize; pm.blocks.len()];
                set.iter().all(|u| {
                    let b = pm.block_of[u];
                    counts[b] += 1;
                    counts[b] <= pm.blocks[b].capacity
                })
            }
            IndependenceSystem::Intersection { members, .. } => {
                members.iter().all(|m| m.admits_unchecked(set))
            }
        }
    }

    /// Whether `set ∪ {u}` is independent. `u` must not already be in `set`.
    pub fn can_extend(&self, set: &ElementSet, u: ElementId) -> Result<bool> {
        let n = self.ground_size();
        set.check_within(n)?;
        if u >= n {
            return Err(Error::Domain { element: u, n });
        }
        if set.contains(u) {
            return Err(Error::Contract(format!("element {u} already in the set")));
        }
        let mut tracker = self.tracker();
        for v in set.iter() {
            if !tracker.can_add(v) {
                return Ok(false);
            }
            tracker.add(v);
        }
        Ok(tracker.can_add(u))
    }

    /// An upper bound on the size of every independent set.
    pub fn rank_upper_bound(&self) -> usize {
        match self {
            IndependenceSystem::Uniform { capacity, .. } => *capacity,
            IndependenceSystem::Partition(pm) => pm.blocks.iter().map(|b| b.capacity).sum(),
            IndependenceSystem::Intersection { members, .. } => members
                .iter()
                .map(Self::rank_upper_bound)
                .min()
                .unwrap_or(0),
        }
    }

    /// Declared extendibility: 1 for a matroid, m for an m-fold intersection.
    pub fn extendibility(&self) -> usize {
        match self {
            IndependenceSystem::Intersection { members, .. } => members.len(),
            _ => 1,
        }
    }

    pub fn is_matroid(&self) -> bool {
        !matches!(self, IndependenceSystem::Intersection { .. })
    }

    /// Fresh incremental counters for a run that starts from the empty set.
    pub fn tracker(&self) -> FeasibilityTracker<'_> {
        FeasibilityTracker {
            state: TrackerState::new(self),
            sys: self,
        }
    }
}

impl IndependenceFamily for IndependenceSystem {
    fn ground_size(&self) -> usize {
        IndependenceSystem::ground_size(self)
    }

    fn admits(&self, set: &ElementSet) -> bool {
        self.admits_unchecked(set)
    }
}

/// Intersection of matroids over the same ground set. Nested intersections
/// are flattened, so the declared k counts matroids, not list entries.
pub fn intersect(members: Vec<IndependenceSystem>) -> Result<IndependenceSystem> {
    let Some(first) = members.first() else {
        return Err(Error::config("intersection needs at least one member"));
    };
    let n = first.ground_size();
    let mut flat = Vec::with_capacity(members.len());
    for m in members {
        if m.ground_size() != n {
            return Err(Error::config(format!(
                "intersection members disagree on ground set size ({} vs {n})",
                m.ground_size()
            )));
        }
        match m {
            IndependenceSystem::Intersection { members, .. } => flat.extend(members),
            other => flat.push(other),
        }
    }
    Ok(IndependenceSystem::Intersection { n, members: flat })
}

#[derive(Clone, Debug)]
enum TrackerState {
    Uniform(usize),
    Partition(Vec<usize>),
    Intersection(Vec<TrackerState>),
}

impl TrackerState {
    fn new(sys: &IndependenceSystem) -> Self {
        match sys {
            IndependenceSystem::Uniform { .. } => TrackerState::Uniform(0),
            IndependenceSystem::Partition(pm) => TrackerState::Partition(vec![0; pm.blocks.len()]),
            IndependenceSystem::Intersection { members, .. } => {
                TrackerState::Intersection(members.iter().map(TrackerState::new).collect())
            }
        }
    }

    fn can_add(&self, sys: &IndependenceSystem, u: ElementId) -> bool {
        match (self, sys) {
            (TrackerState::Uniform(count), IndependenceSystem::Uniform { capacity, .. }) => {
                count < capacity
            }
            (TrackerState::Partition(counts), IndependenceSystem::Partition(pm)) => {
                let b = pm.block_of[u];
                counts[b] < pm.blocks[b].capacity
            }
            (
                TrackerState::Intersection(states),
                IndependenceSystem::Intersection { members, .. },
            ) => states.iter().zip(members).all(|(s, m)| s.can_add(m, u)),
            _ => unreachable!("tracker state built for a different system"),
        }
    }

    fn shift(&mut self, sys: &IndependenceSystem, u: ElementId, add: bool) {
        let step = |c: &mut usize| {
            if add {
                *c += 1
            } else {
                *c -= 1
            }
        };
        match (self, sys) {
            (TrackerState::Uniform(count), IndependenceSystem::Uniform { .. }) => step(count),
            (TrackerState::Partition(counts), IndependenceSystem::Partition(pm)) => {
                step(&mut counts[pm.block_of[u]])
            }
            (
                TrackerState::Intersection(states),
                IndependenceSystem::Intersection { members, .. },
            ) => {
                for (s, m) in states.iter_mut().zip(members) {
                    s.shift(m, u, add);
                }
            }
            _ => unreachable!("tracker state built for a different system"),
        }
    }
}

/// Per-run membership counters giving O(k) extension checks.
///
/// The tracker does not remember which elements were added; callers keep the
/// current set and must only add absent elements and remove present ones.
#[derive(Clone, Debug)]
pub struct FeasibilityTracker<'a> {
    sys: &'a IndependenceSystem,
    state: TrackerState,
}

impl FeasibilityTracker<'_> {
    pub fn can_add(&self, u: ElementId) -> bool {
        self.state.can_add(self.sys, u)
    }

    pub fn add(&mut self, u: ElementId) {
        self.state.shift(self.sys, u, true)
    }

    pub fn remove(&mut self, u: ElementId) {
        self.state.shift(self.sys, u, false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(n: usize, ids: &[usize]) -> ElementSet {
        ElementSet::from_ids(n, ids.iter().copied()).unwrap()
    }

    fn block(members: &[usize], capacity: usize) -> Block {
        Block {
            members: members.to_vec(),
            capacity,
        }
    }

    /// M1 = {0,1}:1, {2}:1 and M2 = {0,2}:1, {1}:1 over three elements.
    pub(crate) fn two_partition_counterexample() -> IndependenceSystem {
        let m1 = IndependenceSystem::partition(3, vec![block(&[0, 1], 1), block(&[2], 1)]).unwrap();
        let m2 = IndependenceSystem::partition(3, vec![block(&[0, 2], 1), block(&[1], 1)]).unwrap();
        intersect(vec![m1, m2]).unwrap()
    }

    #[test]
    fn uniform_membership() {
        let u = IndependenceSystem::uniform(4, 2);
        assert!(u.is_independent(&set(4, &[0, 1])).unwrap());
        assert!(!u.is_independent(&set(4, &[0, 1, 2])).unwrap());
        assert!(u.can_extend(&set(4, &[0]), 1).unwrap());
        assert!(!u.can_extend(&set(4, &[0, 1]), 2).unwrap());
    }

    #[test]
    fn partition_membership() {
        let p = IndependenceSystem::partition(3, vec![block(&[0, 1], 1), block(&[2], 1)]).unwrap();
        assert!(p.is_independent(&set(3, &[0, 2])).unwrap());
        assert!(!p.is_independent(&set(3, &[0, 1])).unwrap());
    }

    #[test]
    fn out_of_range_is_a_domain_error() {
        let u = IndependenceSystem::uniform(3, 2);
        let big = set(5, &[4]);
        assert!(matches!(
            u.is_independent(&big),
            Err(Error::Domain { element: 4, n: 3 })
        ));
        assert!(matches!(
            u.can_extend(&set(3, &[0]), 3),
            Err(Error::Domain { .. })
        ));
        assert!(matches!(
            u.can_extend(&set(3, &[0]), 0),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn partition_validation() {
        let overlap = IndependenceSystem::partition(2, vec![block(&[0], 1), block(&[0, 1], 1)]);
        match overlap {
            Err(Error::Validation { message, .. }) => assert_eq!(message, "blocks overlap at 0"),
            other => panic!("{other:?}"),
        }
        assert!(IndependenceSystem::partition(3, vec![block(&[0, 1], 1)]).is_err());
        assert!(IndependenceSystem::partition(2, vec![block(&[0, 2], 1)]).is_err());
    }

    #[test]
    fn intersections() {
        let single = intersect(vec![IndependenceSystem::uniform(4, 2)]).unwrap();
        let plain = IndependenceSystem::uniform(4, 2);
        for mask in 0..16u64 {
            let s = ElementSet::from_mask(4, mask);
            assert_eq!(
                single.is_independent(&s).unwrap(),
                plain.is_independent(&s).unwrap()
            );
        }
        let two = intersect(vec![
            IndependenceSystem::uniform(4, 2),
            IndependenceSystem::uniform(4, 3),
        ])
        .unwrap();
        assert!(two.is_independent(&set(4, &[0, 1])).unwrap());
        assert!(!two.is_independent(&set(4, &[0, 1, 2])).unwrap());

        let cx = two_partition_counterexample();
        assert!(cx.is_independent(&set(3, &[1, 2])).unwrap());
        assert!(!cx.is_independent(&set(3, &[0, 2])).unwrap());
        assert!(!cx.can_extend(&set(3, &[1, 2]), 0).unwrap());

        assert!(intersect(vec![]).is_err());
        assert!(intersect(vec![
            IndependenceSystem::uniform(3, 1),
            IndependenceSystem::uniform(4, 1)
        ])
        .is_err());
    }

    #[test]
    fn nested_intersections_flatten() {
        let inner = intersect(vec![
            IndependenceSystem::uniform(3, 1),
            IndependenceSystem::uniform(3, 2),
        ])
        .unwrap();
        let outer = intersect(vec![inner, IndependenceSystem::uniform(3, 3)]).unwrap();
        assert_eq!(outer.extendibility(), 3);
    }

    #[test]
    fn rank_and_extendibility() {
        assert_eq!(IndependenceSystem::uniform(9, 7).rank_upper_bound(), 7);
        let p = IndependenceSystem::partition(3, vec![block(&[0], 1), block(&[1, 2], 2)]).unwrap();
        assert_eq!(p.rank_upper_bound(), 3);
        let i = intersect(vec![IndependenceSystem::uniform(3, 5), p.clone()]).unwrap();
        assert_eq!(i.rank_upper_bound(), 3);

        assert_eq!(IndependenceSystem::uniform(4, 3).extendibility(), 1);
        assert_eq!(two_partition_counterexample().extendibility(), 2);
        let three =
            intersect((1..=3).map(|r| IndependenceSystem::uniform(4, r)).collect()).unwrap();
        assert_eq!(three.extendibility(), 3);
    }

    #[test]
    fn desc_round_trip() {
        let cx = two_partition_counterexample();
        assert_eq!(IndependenceSystem::from_desc(&cx.to_desc(), 3).unwrap(), cx);
        let json = serde_json::to_string(&ConstraintDesc::Uniform { r: 2 }).unwrap();
        assert_eq!(json, r#"{"kind":"uniform","r":2}"#);
    }

    fn random_system() -> impl Strategy<Value = IndependenceSystem> {
        let n = 8usize;
        let uniform = (0..=n).prop_map(move |r| IndependenceSystem::uniform(n, r));
        let partition =
            (proptest::collection::vec(0..3usize, n), 0..3usize).prop_map(move |(assign, cap)| {
                let blocks = (0..3)
                    .map(|b| Block {
                        members: (0..n).filter(|&u| assign[u] == b).collect(),
                        capacity: cap + b % 2,
                    })
                    .collect();
                IndependenceSystem::partition(n, blocks).unwrap()
            });
        let matroid = prop_oneof![uniform, partition];
        proptest::collection::vec(matroid, 1..4).prop_map(|ms| intersect(ms).unwrap())
    }

    proptest! {
        #[test]
        fn can_extend_matches_definition(sys in random_system(), mask in 0u64..256, u in 0usize..8) {
            let s = ElementSet::from_mask(8, mask);
            prop_assume!(!s.contains(u));
            prop_assert_eq!(sys.can_extend(&s, u).unwrap(), sys.is_independent(&s.with(u)).unwrap());
        }

        #[test]
        fn tracker_agrees_with_recount(sys in random_system(), order in Just((0..8usize).collect::<Vec<_>>()).prop_shuffle()) {
            let mut tracker = sys.tracker();
            let mut s = ElementSet::empty(8);
            for u in order {
                let expected = sys.is_independent(&s.with(u)).unwrap();
                prop_assert_eq!(tracker.can_add(u), expected);
                if expected {
                    tracker.add(u);
                    s.insert(u);
                }
            }
            for u in s.clone().iter() {
                tracker.remove(u);
                s.remove(u);
                for v in 0..8 {
                    if !s.contains(v) {
                        prop_assert_eq!(tracker.can_add(v), sys.is_independent(&s.with(v)).unwrap());
                    }
                }
            }
        }
    }
}
