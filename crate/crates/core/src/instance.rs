//! Instance files and synthetic instance families.
//!
//! Instances are JSON documents:
//!
//! ```json
//! {"name": "tiny", "n": 3,
//!  "objective": {"kind": "modular", "weights": [10, 7, 3]},
//!  "constraint": {"kind": "uniform", "r": 2}}
//! ```
//!
//! When a `labels` array is present, partition-block members and cut-edge
//! endpoints may name elements by label; they are resolved to dense ids on load.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use rand::seq::{index, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::constraints::{intersect, Block, ConstraintDesc, IndependenceSystem};
use crate::error::{Error, Result};
use crate::ground::{seeded_rng, RngState};
use crate::objectives::{build_objective, ObjectiveDesc, SetFunction, ValueOracle};
use crate::solvers::brute_force_opt;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub name: String,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub objective: ObjectiveDesc,
    pub constraint: ConstraintDesc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub opt_value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub opt_provenance: Option<String>,
}

/// A validated instance ready for solving.
#[derive(Clone, Debug)]
pub struct Problem {
    pub name: String,
    pub objective: Arc<dyn SetFunction>,
    pub constraint: IndependenceSystem,
    pub opt_value: Option<f64>,
}

impl Problem {
    pub fn n(&self) -> usize {
        self.constraint.ground_size()
    }

    /// A new oracle handle with a zeroed counter.
    pub fn oracle(&self) -> ValueOracle {
        ValueOracle::new(Arc::clone(&self.objective))
    }
}

impl InstanceSpec {
    pub fn build(&self) -> Result<Problem> {
        if self.objective.ground_size() != self.n {
            return Err(Error::validation(
                "objective",
                format!(
                    "describes {} elements but n = {}",
                    self.objective.ground_size(),
                    self.n
                ),
            ));
        }
        if let Some(labels) = &self.labels {
            if labels.len() != self.n {
                return Err(Error::validation(
                    "labels",
                    format!("{} labels for n = {}", labels.len(), self.n),
                ));
            }
        }
        if let Some(opt) = self.opt_value {
            if !(opt.is_finite() && opt >= 0.0) {
                return Err(Error::validation(
                    "opt_value",
                    format!("{opt} is not a finite non-negative value"),
                ));
            }
        }
        let objective = crate::objectives::build_objective_at(&self.objective, "objective")?;
        let constraint = IndependenceSystem::from_desc(&self.constraint, self.n)?;
        Ok(Problem {
            name: self.name.clone(),
            objective,
            constraint,
            opt_value: self.opt_value,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mut doc: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        resolve_labels(&mut doc)?;
        let spec: InstanceSpec =
            serde_json::from_value(doc).map_err(|e| Error::Parse(e.to_string()))?;
        spec.build()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance specs always serialize")
    }

    /// Computes the exact optimum by enumeration and records it.
    pub fn with_brute_force_opt(mut self) -> Result<Self> {
        let problem = self.build()?;
        let res = brute_force_opt(&problem.oracle(), &problem.constraint)?;
        self.opt_value = Some(res.value);
        self.opt_provenance = Some(format!("brute_force_opt, solution {}", res.solution));
        Ok(self)
    }
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<InstanceSpec> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    InstanceSpec::from_json(&text)
}

pub fn save_instance(spec: &InstanceSpec, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, spec.to_json() + "\n").map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn resolve_labels(doc: &mut Value) -> Result<()> {
    let Some(labels) = doc.get("labels").and_then(Value::as_array) else {
        return Ok(());
    };
    let mut index = HashMap::new();
    for (i, l) in labels.iter().enumerate() {
        let name = l
            .as_str()
            .ok_or_else(|| Error::validation(format!("labels[{i}]"), "labels must be strings"))?;
        if index.insert(name.to_owned(), i).is_some() {
            return Err(Error::validation(
                format!("labels[{i}]"),
                format!("duplicate label '{name}'"),
            ));
        }
    }
    let lookup = |v: &mut Value, field: String| -> Result<()> {
        if let Some(name) = v.as_str() {
            let id = *index
                .get(name)
                .ok_or_else(|| Error::validation(field, format!("unknown label '{name}'")))?;
            *v = Value::from(id);
        }
        Ok(())
    };

    fn walk_constraint(
        c: &mut Value,
        field: &str,
        lookup: &dyn Fn(&mut Value, String) -> Result<()>,
    ) -> Result<()> {
        if let Some(blocks) = c.get_mut("blocks").and_then(Value::as_array_mut) {
            for (b, block) in blocks.iter_mut().enumerate() {
                if let Some(members) = block.get_mut("members").and_then(Value::as_array_mut) {
                    for (j, m) in members.iter_mut().enumerate() {
                        lookup(m, format!("{field}.blocks[{b}].members[{j}]"))?;
                    }
                }
            }
        }
        if let Some(members) = c.get_mut("members").and_then(Value::as_array_mut) {
            for (i, m) in members.iter_mut().enumerate() {
                walk_constraint(m, &format!("{field}.members[{i}]"), lookup)?;
            }
        }
        Ok(())
    }

    if let Some(c) = doc.get_mut("constraint") {
        walk_constraint(c, "constraint", &lookup)?;
    }
    if let Some(edges) = doc
        .get_mut("objective")
        .and_then(|o| o.get_mut("edges"))
        .and_then(Value::as_array_mut)
    {
        for (i, e) in edges.iter_mut().enumerate() {
            if let Some(parts) = e.as_array_mut() {
                for end in parts.iter_mut().take(2) {
                    lookup(end, format!("objective.edges[{i}]"))?;
                }
            }
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    RandomCoverage,
    RandomFacilityLocation,
    RandomCut,
    RandomModular,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::RandomCoverage,
        Family::RandomFacilityLocation,
        Family::RandomCut,
        Family::RandomModular,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::RandomCoverage => "random-coverage",
            Family::RandomFacilityLocation => "random-facility-location",
            Family::RandomCut => "random-cut",
            Family::RandomModular => "random-modular",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::config(format!("unknown family '{s}'")))
    }
}

/// Parameters of a synthetic instance.
///
/// `universe` is the number of coverage items or facility-location clients;
/// `density` is the expected fraction of items per cover set, of nonzero
/// client weights, or of present cut edges. The constraint intersects `k`
/// partition matroids, each splitting the elements round-robin over `rank`
/// capacity-1 blocks after a random shuffle.
#[derive(Clone, Debug, PartialEq)]
pub struct GenSpec {
    pub family: Family,
    pub n: usize,
    pub k: usize,
    pub rank: usize,
    pub density: f64,
    pub universe: usize,
}

impl GenSpec {
    pub fn new(family: Family, n: usize) -> Self {
        Self {
            family,
            n,
            k: 2,
            rank: 4,
            density: 0.3,
            universe: 30,
        }
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn with_rank(mut self, rank: usize) -> Self {
        self.rank = rank;
        self
    }

    pub fn with_density(mut self, density: f64) -> Self {
        self.density = density;
        self
    }

    pub fn with_universe(mut self, universe: usize) -> Self {
        self.universe = universe;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::config("k must be at least 1"));
        }
        if self.rank == 0 {
            return Err(Error::config("rank must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.density) {
            return Err(Error::config(format!(
                "density {} outside [0, 1]",
                self.density
            )));
        }
        if self.universe == 0
            && matches!(
                self.family,
                Family::RandomCoverage | Family::RandomFacilityLocation
            )
        {
            return Err(Error::config("universe must be at least 1"));
        }
        Ok(())
    }
}

/// Deterministic for a given `(spec, rng state)`.
pub fn generate_instance(spec: &GenSpec, rng: &mut RngState) -> Result<InstanceSpec> {
    spec.validate()?;
    let n = spec.n;
    let objective = match spec.family {
        Family::RandomModular => random_modular(n, rng),
        Family::RandomCoverage => random_coverage(n, spec.universe, spec.density, rng),
        Family::RandomFacilityLocation => {
            random_facility_location(n, spec.universe, spec.density, rng)
        }
        Family::RandomCut => random_cut(n, spec.density, rng),
    };
    let mut members: Vec<ConstraintDesc> = (0..spec.k)
        .map(|_| ConstraintDesc::Partition {
            blocks: random_blocks(n, spec.rank, rng),
        })
        .collect();
    let constraint = if members.len() == 1 {
        members.pop().expect("one member")
    } else {
        ConstraintDesc::Intersection { members }
    };
    Ok(InstanceSpec {
        name: format!("{}-n{}-k{}-s{}", spec.family, n, spec.k, rng.seed()),
        n,
        labels: None,
        objective,
        constraint,
        opt_value: None,
        opt_provenance: None,
    })
}

/// Convenience: generate from a bare seed on stream 0.
pub fn generate_seeded(spec: &GenSpec, seed: u64) -> Result<InstanceSpec> {
    generate_instance(spec, &mut seeded_rng(seed, 0))
}

fn random_modular(n: usize, rng: &mut RngState) -> ObjectiveDesc {
    ObjectiveDesc::Modular {
        weights: (0..n).map(|_| rng.random_range(0.0..10.0)).collect(),
    }
}

fn random_coverage(n: usize, universe: usize, density: f64, rng: &mut RngState) -> ObjectiveDesc {
    let universe_weights = (0..universe).map(|_| rng.random_range(1.0..2.0)).collect();
    let max_size = ((2.0 * density * universe as f64).round() as usize).clamp(1, universe);
    let covers = (0..n)
        .map(|_| {
            let size = rng.random_range(1..=max_size);
            let mut items = index::sample(rng, universe, size).into_vec();
            items.sort_unstable();
            items
        })
        .collect();
    ObjectiveDesc::Coverage {
        universe_weights,
        covers,
    }
}

fn random_facility_location(
    n: usize,
    clients: usize,
    density: f64,
    rng: &mut RngState,
) -> ObjectiveDesc {
    let weights = (0..clients)
        .map(|_| {
            (0..n)
                .map(|_| {
                    if rng.random_bool(density) {
                        rng.random_range(0.0..1.0)
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    ObjectiveDesc::FacilityLocation { weights }
}

fn random_cut(n: usize, density: f64, rng: &mut RngState) -> ObjectiveDesc {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(density) {
                edges.push((u, v, rng.random_range(0.5..1.5)));
            }
        }
    }
    ObjectiveDesc::GraphCut { n, edges }
}

fn random_blocks(n: usize, count: usize, rng: &mut RngState) -> Vec<Block> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut blocks = vec![
        Block {
            members: Vec::new(),
            capacity: 1
        };
        count
    ];
    for (i, u) in order.into_iter().enumerate() {
        blocks[i % count].members.push(u);
    }
    for b in &mut blocks {
        b.members.sort_unstable();
    }
    blocks
}

/// A partition matroid with `count` capacity-1 blocks.
pub fn random_partition(n: usize, count: usize, rng: &mut RngState) -> IndependenceSystem {
    IndependenceSystem::partition(n, random_blocks(n, count, rng))
        .expect("round-robin blocks partition 0..n")
}

/// Intersection of `k` random partition matroids (a single one for `k = 1`).
pub fn random_k_system(n: usize, k: usize, rank: usize, rng: &mut RngState) -> IndependenceSystem {
    let members = (0..k)
        .map(|_| random_partition(n, rank, rng))
        .collect::<Vec<_>>();
    if k == 1 {
        members.into_iter().next().expect("one member")
    } else {
        intersect(members).expect("members share n")
    }
}

/// Builds a random objective of the given family directly.
pub fn random_objective(family: Family, n: usize, rng: &mut RngState) -> Arc<dyn SetFunction> {
    let spec = GenSpec::new(family, n);
    let desc = match family {
        Family::RandomModular => random_modular(n, rng),
        Family::RandomCoverage => random_coverage(n, spec.universe, spec.density, rng),
        Family::RandomFacilityLocation => {
            random_facility_location(n, spec.universe, spec.density, rng)
        }
        Family::RandomCut => random_cut(n, spec.density, rng),
    };
    build_objective(&desc).expect("generated objectives are valid")
}
