use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{GainTracker, SetFunction};
use crate::error::{Error, Result};
use crate::ground::{ElementId, ElementSet};

/// Serializable objective description, as found in instance files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ObjectiveDesc {
    Modular {
        weights: Vec<f64>,
    },
    Coverage {
        universe_weights: Vec<f64>,
        covers: Vec<Vec<usize>>,
    },
    /// Rows are clients, columns are facilities (the ground set).
    FacilityLocation {
        weights: Vec<Vec<f64>>,
    },
    GraphCut {
        n: usize,
        edges: Vec<(usize, usize, f64)>,
    },
}

impl ObjectiveDesc {
    /// Ground-set size implied by the description.
    pub fn ground_size(&self) -> usize {
        match self {
            ObjectiveDesc::Modular { weights } => weights.len(),
            ObjectiveDesc::Coverage { covers, .. } => covers.len(),
            ObjectiveDesc::FacilityLocation { weights } => weights.first().map_or(0, Vec::len),
            ObjectiveDesc::GraphCut { n, .. } => *n,
        }
    }
}

fn check_weight(w: f64, field: impl FnOnce() -> String) -> Result<f64> {
    if w.is_finite() && w >= 0.0 {
        Ok(w)
    } else {
        Err(Error::validation(
            field(),
            format!("weight {w} must be finite and non-negative"),
        ))
    }
}

/// Validates a description and builds the matching function.
pub fn build_objective(desc: &ObjectiveDesc) -> Result<Arc<dyn SetFunction>> {
    build_objective_at(desc, "objective")
}

pub(crate) fn build_objective_at(
    desc: &ObjectiveDesc,
    field: &str,
) -> Result<Arc<dyn SetFunction>> {
    Ok(match desc {
        ObjectiveDesc::Modular { weights } => Arc::new(Modular::new_at(weights.clone(), field)?),
        ObjectiveDesc::Coverage {
            universe_weights,
            covers,
        } => Arc::new(Coverage::new_at(
            universe_weights.clone(),
            covers.clone(),
            field,
        )?),
        ObjectiveDesc::FacilityLocation { weights } => {
            Arc::new(FacilityLocation::new_at(weights.clone(), field)?)
        }
        ObjectiveDesc::GraphCut { n, edges } => Arc::new(GraphCut::new_at(*n, edges, field)?),
    })
}

/// `f(S) = Σ_{u∈S} w_u`.
#[derive(Clone, Debug, PartialEq)]
pub struct Modular {
    weights: Vec<f64>,
}

impl Modular {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        Self::new_at(weights, "objective")
    }

    fn new_at(weights: Vec<f64>, field: &str) -> Result<Self> {
        for (i, &w) in weights.iter().enumerate() {
            check_weight(w, || format!("{field}.weights[{i}]"))?;
        }
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl SetFunction for Modular {
    fn ground_size(&self) -> usize {
        self.weights.len()
    }

    fn value(&self, set: &ElementSet) -> f64 {
        set.iter().map(|u| self.weights[u]).sum()
    }

    fn kind(&self) -> &'static str {
        "modular"
    }

    fn monotone_hint(&self) -> bool {
        true
    }

    fn gain_tracker(&self) -> Option<Box<dyn GainTracker + '_>> {
        Some(Box::new(ModularTracker {
            f: self,
            value: 0.0,
        }))
    }
}

struct ModularTracker<'a> {
    f: &'a Modular,
    value: f64,
}

impl GainTracker for ModularTracker<'_> {
    fn gain(&mut self, u: ElementId) -> f64 {
        self.f.weights[u]
    }

    fn insert(&mut self, u: ElementId) {
        self.value += self.f.weights[u];
    }

    fn value(&self) -> f64 {
        self.value
    }
}

/// Weighted coverage: `f(S)` is the total weight of universe items covered
/// by the sets of the chosen elements.
#[derive(Clone, Debug, PartialEq)]
pub struct Coverage {
    universe_weights: Vec<f64>,
    covers: Vec<Vec<usize>>,
}

impl Coverage {
    pub fn new(universe_weights: Vec<f64>, covers: Vec<Vec<usize>>) -> Result<Self> {
        Self::new_at(universe_weights, covers, "objective")
    }

    fn new_at(
        universe_weights: Vec<f64>,
        mut covers: Vec<Vec<usize>>,
        field: &str,
    ) -> Result<Self> {
        for (i, &w) in universe_weights.iter().enumerate() {
            check_weight(w, || format!("{field}.universe_weights[{i}]"))?;
        }
        for (u, items) in covers.iter_mut().enumerate() {
            if let Some(j) = items.iter().position(|&it| it >= universe_weights.len()) {
                return Err(Error::validation(
                    format!("{field}.covers[{u}][{j}]"),
                    format!(
                        "item {} outside universe of size {}",
                        items[j],
                        universe_weights.len()
                    ),
                ));
            }
            items.sort_unstable();
            items.dedup();
        }
        Ok(Self {
            universe_weights,
            covers,
        })
    }

    pub fn covers(&self) -> &[Vec<usize>] {
        &self.covers
    }

    pub fn universe_weights(&self) -> &[f64] {
        &self.universe_weights
    }
}

impl SetFunction for Coverage {
    fn ground_size(&self) -> usize {
        self.covers.len()
    }

    fn value(&self, set: &ElementSet) -> f64 {
        let mut covered = vec![false; self.universe_weights.len()];
        let mut total = 0.0;
        for u in set.iter() {
            for &it in &self.covers[u] {
                if !covered[it] {
                    covered[it] = true;
                    total += self.universe_weights[it];
                }
            }
        }
        total
    }

    fn kind(&self) -> &'static str {
        "coverage"
    }

    fn monotone_hint(&self) -> bool {
        true
    }

    fn gain_tracker(&self) -> Option<Box<dyn GainTracker + '_>> {
        Some(Box::new(CoverageTracker {
            f: self,
            covered: vec![false; self.universe_weights.len()],
            value: 0.0,
        }))
    }
}

struct CoverageTracker<'a> {
    f: &'a Coverage,
    covered: Vec<bool>,
    value: f64,
}

impl GainTracker for CoverageTracker<'_> {
    fn gain(&mut self, u: ElementId) -> f64 {
        self.f.covers[u]
            .iter()
            .filter(|&&it| !self.covered[it])
            .map(|&it| self.f.universe_weights[it])
            .sum()
    }

    fn insert(&mut self, u: ElementId) {
        for &it in &self.f.covers[u] {
            if !self.covered[it] {
                self.covered[it] = true;
                self.value += self.f.universe_weights[it];
            }
        }
    }

    fn value(&self) -> f64 {
        self.value
    }
}

/// Facility location: `f(S) = Σ_clients max_{j∈S} w[client][j]`, with an
/// empty maximum counted as 0.
#[derive(Clone, Debug, PartialEq)]
pub struct FacilityLocation {
    /// `by_facility[j][c]`, transposed from the client-major input.
    by_facility: Vec<Vec<f64>>,
    clients: usize,
}

impl FacilityLocation {
    pub fn new(weights: Vec<Vec<f64>>) -> Result<Self> {
        Self::new_at(weights, "objective")
    }

    fn new_at(weights: Vec<Vec<f64>>, field: &str) -> Result<Self> {
        let facilities = weights.first().map_or(0, Vec::len);
        let mut by_facility = vec![Vec::with_capacity(weights.len()); facilities];
        for (c, row) in weights.iter().enumerate() {
            if row.len() != facilities {
                return Err(Error::validation(
                    format!("{field}.weights[{c}]"),
                    format!("row has {} entries, expected {facilities}", row.len()),
                ));
            }
            for (j, &w) in row.iter().enumerate() {
                by_facility[j].push(check_weight(w, || format!("{field}.weights[{c}][{j}]"))?);
            }
        }
        Ok(Self {
            by_facility,
            clients: weights.len(),
        })
    }

    pub fn client_major(&self) -> Vec<Vec<f64>> {
        (0..self.clients)
            .map(|c| self.by_facility.iter().map(|col| col[c]).collect())
            .collect()
    }
}

impl SetFunction for FacilityLocation {
    fn ground_size(&self) -> usize {
        self.by_facility.len()
    }

    fn value(&self, set: &ElementSet) -> f64 {
        (0..self.clients)
            .map(|c| {
                set.iter()
                    .map(|j| self.by_facility[j][c])
                    .fold(0.0, f64::max)
            })
            .sum()
    }

    fn kind(&self) -> &'static str {
        "facility_location"
    }

    fn monotone_hint(&self) -> bool {
        true
    }

    fn gain_tracker(&self) -> Option<Box<dyn GainTracker + '_>> {
        Some(Box::new(FacilityTracker {
            f: self,
            best: vec![0.0; self.clients],
            value: 0.0,
        }))
    }
}

struct FacilityTracker<'a> {
    f: &'a FacilityLocation,
    best: Vec<f64>,
    value: f64,
}

impl GainTracker for FacilityTracker<'_> {
    fn gain(&mut self, u: ElementId) -> f64 {
        self.f.by_facility[u]
            .iter()
            .zip(&self.best)
            .map(|(&w, &b)| (w - b).max(0.0))
            .sum()
    }

    fn insert(&mut self, u: ElementId) {
        for (b, &w) in self.best.iter_mut().zip(&self.f.by_facility[u]) {
            if w > *b {
                self.value += w - *b;
                *b = w;
            }
        }
    }

    fn value(&self) -> f64 {
        self.value
    }
}

/// Undirected weighted cut: `f(S)` is the weight of edges with exactly one
/// endpoint in `S`. Symmetric, hence non-monotone.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphCut {
    edges: Vec<(usize, usize, f64)>,
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl GraphCut {
    pub fn new(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        Self::new_at(n, edges, "objective")
    }

    fn new_at(n: usize, edges: &[(usize, usize, f64)], field: &str) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        for (i, &(u, v, w)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(Error::validation(
                    format!("{field}.edges[{i}]"),
                    format!("endpoint outside 0..{n}"),
                ));
            }
            check_weight(w, || format!("{field}.edges[{i}]"))?;
            // self-loops never cross a cut
            if u != v {
                adjacency[u].push((v, w));
                adjacency[v].push((u, w));
            }
        }
        Ok(Self {
            edges: edges.to_vec(),
            adjacency,
        })
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }
}

impl SetFunction for GraphCut {
    fn ground_size(&self) -> usize {
        self.adjacency.len()
    }

    fn value(&self, set: &ElementSet) -> f64 {
        self.edges
            .iter()
            .filter(|(u, v, _)| set.contains(*u) != set.contains(*v))
            .map(|e| e.2)
            .sum()
    }

    fn kind(&self) -> &'static str {
        "graph_cut"
    }

    fn gain_tracker(&self) -> Option<Box<dyn GainTracker + '_>> {
        Some(Box::new(CutTracker {
            f: self,
            inside: vec![false; self.adjacency.len()],
            value: 0.0,
        }))
    }
}

struct CutTracker<'a> {
    f: &'a GraphCut,
    inside: Vec<bool>,
    value: f64,
}

impl GainTracker for CutTracker<'_> {
    fn gain(&mut self, u: ElementId) -> f64 {
        self.f.adjacency[u]
            .iter()
            .map(|&(v, w)| if self.inside[v] { -w } else { w })
            .sum()
    }

    fn insert(&mut self, u: ElementId) {
        self.value += self.gain(u);
        self.inside[u] = true;
    }

    fn value(&self) -> f64 {
        self.value
    }
}

/// `h(X) = f(X ∪ F)` for a fixed set `F`. Submodular and non-negative when
/// `f` is, but not normalized unless `f(F) = 0`.
#[derive(Debug)]
pub struct Shifted {
    base: Arc<dyn SetFunction>,
    fixed: ElementSet,
}

impl Shifted {
    pub fn new(base: Arc<dyn SetFunction>, fixed: ElementSet) -> Result<Self> {
        fixed.check_within(base.ground_size())?;
        Ok(Self { base, fixed })
    }
}

impl SetFunction for Shifted {
    fn ground_size(&self) -> usize {
        self.base.ground_size()
    }

    fn value(&self, set: &ElementSet) -> f64 {
        self.base.value(&set.union(&self.fixed))
    }

    fn kind(&self) -> &'static str {
        "shifted"
    }

    fn monotone_hint(&self) -> bool {
        self.base.monotone_hint()
    }
}
