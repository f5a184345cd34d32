//! Deliberately broken set functions ("plants") that the property verifiers
//! must reject. Useful for checking that a verification run can fail.

use crate::ground::ElementSet;
use crate::objectives::SetFunction;

/// PLANT: `f(S) = |S|²`, supermodular.
#[derive(Debug)]
pub struct SquaredSize(pub usize);

impl SetFunction for SquaredSize {
    fn ground_size(&self) -> usize {
        self.0
    }
    fn value(&self, set: &ElementSet) -> f64 {
        (set.len() * set.len()) as f64
    }
    fn kind(&self) -> &'static str {
        "plant_squared_size"
    }
}

/// PLANT: negative on singletons, `|S|` elsewhere.
#[derive(Debug)]
pub struct NegativeSingletons(pub usize);

impl SetFunction for NegativeSingletons {
    fn ground_size(&self) -> usize {
        self.0
    }
    fn value(&self, set: &ElementSet) -> f64 {
        if set.len() == 1 {
            -1.0
        } else {
            set.len() as f64
        }
    }
    fn kind(&self) -> &'static str {
        "plant_negative_singletons"
    }
}
