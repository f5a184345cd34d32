use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use super::{GainTracker, SetFunction};
use crate::error::{Error, Result};
use crate::ground::{ElementId, ElementSet};

/// A set function plus a counter of the evaluations made through it.
///
/// Counting rule: `eval` costs 1, the definitional `marginal_gain` costs 2,
/// and every `gain` on a [`MarginalSession`] costs 1. The payload is shared;
/// [`ValueOracle::fresh`] gives a new handle with its own zeroed counter.
#[derive(Debug)]
pub struct ValueOracle {
    function: Arc<dyn SetFunction>,
    calls: AtomicU64,
}

impl ValueOracle {
    pub fn new(function: Arc<dyn SetFunction>) -> Self {
        Self {
            function,
            calls: AtomicU64::new(0),
        }
    }

    pub fn fresh(&self) -> Self {
        Self::new(Arc::clone(&self.function))
    }

    pub fn function(&self) -> &Arc<dyn SetFunction> {
        &self.function
    }

    pub fn ground_size(&self) -> usize {
        self.function.ground_size()
    }

    pub fn kind(&self) -> &'static str {
        self.function.kind()
    }

    pub fn monotone_hint(&self) -> bool {
        self.function.monotone_hint()
    }

    fn charge(&self, calls: u64) {
        self.calls.fetch_add(calls, Ordering::Relaxed);
    }

    pub fn eval(&self, set: &ElementSet) -> Result<f64> {
        set.check_within(self.ground_size())?;
        self.charge(1);
        Ok(self.function.value(set))
    }

    /// Evaluates without touching the counter. Used for post-hoc checks.
    pub fn peek(&self, set: &ElementSet) -> f64 {
        self.function.value(set)
    }

    /// `f(S ∪ {u}) − f(S)` by two evaluations.
    pub fn marginal_gain(&self, u: ElementId, set: &ElementSet) -> Result<f64> {
        let n = self.ground_size();
        if u >= n {
            return Err(Error::Domain { element: u, n });
        }
        if set.contains(u) {
            return Err(Error::Contract(format!(
                "marginal gain of {u} requested for a set containing it"
            )));
        }
        let with = self.eval(&set.with(u))?;
        Ok(with - self.eval(set)?)
    }

    pub fn call_count(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn reset_count(&self) {
        self.calls.store(0, Ordering::Relaxed);
    }

    /// Starts an incremental session at the empty set.
    pub fn session(&self) -> MarginalSession<'_> {
        let tracker = self
            .function
            .gain_tracker()
            .unwrap_or_else(|| Box::new(EvalTracker::new(self.function.as_ref())));
        let mut session = MarginalSession {
            oracle: self,
            tracker,
            set: ElementSet::empty(self.ground_size()),
        };
        session.settle();
        session
    }
}

/// Incremental `Δf(u | S)` queries for a growing set `S`, charged to the
/// owning oracle at one call per query.
pub struct MarginalSession<'a> {
    oracle: &'a ValueOracle,
    tracker: Box<dyn GainTracker + 'a>,
    set: ElementSet,
}

impl MarginalSession<'_> {
    fn settle(&mut self) {
        let extra = self.tracker.take_extra_evaluations();
        self.oracle.charge(extra);
    }

    /// `Δf(u | S)`. `u` must be in range and not in `S`.
    pub fn gain(&mut self, u: ElementId) -> f64 {
        debug_assert!(!self.set.contains(u));
        self.oracle.charge(1);
        let g = self.tracker.gain(u);
        self.settle();
        g
    }

    pub fn insert(&mut self, u: ElementId) {
        debug_assert!(!self.set.contains(u));
        self.tracker.insert(u);
        self.set.insert(u);
        self.settle();
    }

    pub fn value(&self) -> f64 {
        self.tracker.value()
    }

    pub fn set(&self) -> &ElementSet {
        &self.set
    }

    pub fn into_set(self) -> ElementSet {
        self.set
    }
}

/// Fallback tracker: `Δf(u | S)` as `f(S ∪ {u})` minus a cached `f(S)`.
struct EvalTracker<'a> {
    f: &'a dyn SetFunction,
    set: ElementSet,
    value: f64,
    last: Option<(ElementId, f64)>,
    extra: u64,
}

impl<'a> EvalTracker<'a> {
    fn new(f: &'a dyn SetFunction) -> Self {
        let set = ElementSet::empty(f.ground_size());
        let value = f.value(&set);
        Self {
            f,
            set,
            value,
            last: None,
            extra: 1,
        }
    }
}

impl GainTracker for EvalTracker<'_> {
    fn gain(&mut self, u: ElementId) -> f64 {
        self.set.insert(u);
        let with = self.f.value(&self.set);
        self.set.remove(u);
        self.last = Some((u, with));
        with - self.value
    }

    fn insert(&mut self, u: ElementId) {
        self.set.insert(u);
        self.value = match self.last.take() {
            Some((v, with)) if v == u => with,
            _ => {
                self.extra += 1;
                self.f.value(&self.set)
            }
        };
    }

    fn value(&self) -> f64 {
        self.value
    }

    fn take_extra_evaluations(&mut self) -> u64 {
        std::mem::take(&mut self.extra)
    }
}
