use crate::coloring::{Coloring, Cover};
use crate::convexity::{complete_to_convex, is_cover, recoloring_cost};
use crate::error::{Error, Result};
use crate::instance::{Instance, Vertex};
use crate::weight::Weight;

/// Output of an approximation algorithm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    /// The cover `X` the algorithm produced.
    pub cover: Cover,
    /// `w(X)`; the quantity the approximation guarantees bound.
    pub cover_weight: Weight,
    /// Total convex completion of `C` restricted to `V \ X`.
    pub coloring: Coloring,
    /// Recoloring cost of `coloring`; never above `cover_weight`.
    pub cost: Weight,
}

impl Solution {
    /// Completes a cover of `inst` into a total convex recoloring.
    pub fn from_cover(inst: &Instance, cover: Cover) -> Result<Solution> {
        if !is_cover(inst, &cover) {
            return Err(Error::Invariant("algorithm returned a set that is not a cover".into()));
        }
        let coloring = complete_to_convex(inst, &inst.coloring().without(&cover))?;
        let cost = recoloring_cost(inst, &coloring);
        let cover_weight = cover.weight(inst);
        debug_assert!(cost <= cover_weight);
        Ok(Solution { cover, cover_weight, coloring, cost })
    }
}

/// One local-ratio round: `eps` was subtracted from each listed vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalRatioStep {
    pub vertices: Vec<Vertex>,
    pub epsilon: Weight,
}

/// Subtracts `eps` from the given vertices and returns those that hit zero.
pub(crate) fn subtract(weights: &mut [Weight], vertices: &[Vertex], eps: Weight) -> Vec<Vertex> {
    let mut zeroed = Vec::new();
    for &v in vertices {
        weights[v] -= eps;
        debug_assert!(weights[v].0 >= 0);
        if weights[v].is_zero() {
            zeroed.push(v);
        }
    }
    zeroed
}
