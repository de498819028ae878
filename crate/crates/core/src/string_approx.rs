//! Approximations for colored strings.
//!
//! [`two_approx_string`] builds a convex coloring from the per-color best
//! blocks in one left-to-right scan; its cost never exceeds the penalty sum,
//! hence at most twice the optimum. [`three_string_approx`] is the local-ratio
//! baseline that repeatedly discounts a violating triple.

use crate::coloring::{Coloring, Cover};
use crate::convexity::{overwritten, recoloring_cost};
use crate::error::{Error, Result};
use crate::instance::{ColorId, Instance, Vertex};
use crate::penalty::{best_blocks_string, BestBlock};
use crate::solution::{subtract, LocalRatioStep, Solution};
use crate::weight::Weight;

/// A maximal run `F_j` of the output coloring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stage {
    pub color: ColorId,
    pub start: Vertex,
    pub end: Vertex,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanResult {
    pub coloring: Coloring,
    /// Overwritten set of `coloring`.
    pub cover: Cover,
    pub cost: Weight,
    pub stages: Vec<Stage>,
    pub blocks: Vec<BestBlock>,
    pub sum_p_star: Weight,
}

/// Where the scan currently is: stage `j`, its color `d_j` and the first
/// vertex of `F_j`.
#[derive(Debug, Clone, Copy)]
struct ScanState {
    stage: usize,
    color: ColorId,
    block_start: Vertex,
}

/// Best blocks as half-open intervals, for O(1) membership.
struct Intervals(Vec<Option<(Vertex, Vertex)>>);

impl Intervals {
    fn new(blocks: &[BestBlock]) -> Intervals {
        Intervals(blocks.iter().map(|b| b.block.first().map(|&s| (s, *b.block.last().unwrap() + 1))).collect())
    }

    fn covers(&self, d: ColorId, v: Vertex) -> bool {
        self.0[d].is_some_and(|(s, e)| s <= v && v < e)
    }

    /// Smallest color whose best block contains `v`.
    fn first_cover(&self, v: Vertex) -> Option<ColorId> {
        (0..self.0.len()).find(|&d| self.covers(d, v))
    }
}

/// The 2-approximation for strings.
///
/// Colors each vertex with the current stage color while it is free or
/// covered by that color's best block; a vertex covered only by other colors
/// opens a new stage with the smallest such color.
pub fn two_approx_string(inst: &Instance) -> Result<ScanResult> {
    if !inst.is_string() {
        return Err(Error::NotAString);
    }
    let n = inst.len();
    // zero-weight vertices have zero gain, so blocks need no support normalization
    let blocks = best_blocks_string(inst)?;
    let sum_p_star = blocks.iter().map(|b| b.p_star).sum();
    let intervals = Intervals::new(&blocks);

    let first = (0..n).find_map(|v| intervals.first_cover(v));
    let Some(d1) = first else {
        // nothing is covered: keep the heaviest color everywhere
        let keep = (0..inst.palette_len())
            .max_by_key(|&d| {
                let w: Weight = inst.vertices().filter(|&v| inst.color(v) == Some(d)).map(|v| inst.weight(v)).sum();
                (w, std::cmp::Reverse(d))
            })
            .unwrap_or(0);
        let coloring = Coloring::constant(n, keep);
        let cover = overwritten(&inst.support_normalized(), &coloring);
        let cost = cover.weight(inst);
        let stages = vec![Stage { color: keep, start: 0, end: n - 1 }];
        return Ok(ScanResult { coloring, cover, cost, stages, blocks, sum_p_star });
    };

    let mut colors = Vec::with_capacity(n);
    let mut stages = Vec::new();
    let mut cover = Vec::with_capacity(n);
    let mut cost = Weight::ZERO;
    let mut state = ScanState { stage: 1, color: d1, block_start: 0 };
    for (v, (&w, &c)) in inst.weights().iter().zip(inst.colors()).enumerate() {
        let next = if intervals.covers(state.color, v) { None } else { intervals.first_cover(v) };
        if let Some(d) = next {
            stages.push(Stage { color: state.color, start: state.block_start, end: v - 1 });
            state = ScanState { stage: state.stage + 1, color: d, block_start: v };
        }
        colors.push(Some(state.color));
        if w.is_positive() && c.is_some_and(|c| c != state.color) {
            cover.push(v);
            cost += w;
        }
    }
    stages.push(Stage { color: state.color, start: state.block_start, end: n - 1 });
    debug_assert_eq!(stages.len(), state.stage);

    let coloring = Coloring::new(colors);
    debug_assert_eq!(cost, recoloring_cost(&inst.support_normalized(), &coloring));
    // pushed in ascending order
    Ok(ScanResult { coloring, cover: Cover::from_sorted(cover), cost, stages, blocks, sum_p_star })
}

/// A triple `x < y < z` of colored vertices in `support` with
/// `C(x) = C(z) != C(y)`, or `None` when the coloring restricted to
/// `support` is convex.
///
/// Returns the leftmost possible `z`, with `x` the nearest earlier vertex of
/// its color and `y` the colored support vertex right before `z`.
pub fn find_string_violation(inst: &Instance, support: &[Vertex]) -> Option<(Vertex, Vertex, Vertex)> {
    let mut last = vec![None; inst.palette_len()];
    let mut prev: Option<(Vertex, ColorId)> = None;
    let mut sorted = support.to_vec();
    sorted.sort_unstable();
    for z in sorted {
        let Some(d) = inst.color(z) else { continue };
        if let (Some(x), Some((y, dy))) = (last[d], prev) {
            if dy != d {
                return Some((x, y, z));
            }
        }
        last[d] = Some(z);
        prev = Some((z, d));
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalRatioResult {
    pub solution: Solution,
    pub steps: Vec<LocalRatioStep>,
}

/// The local-ratio 3-approximation for strings.
pub fn three_string_approx(inst: &Instance) -> Result<LocalRatioResult> {
    if !inst.is_string() {
        return Err(Error::NotAString);
    }
    let inst = inst.support_normalized();
    let mut weights = inst.weights().to_vec();
    let mut steps = Vec::new();
    loop {
        let support: Vec<Vertex> = inst.vertices().filter(|&v| weights[v].is_positive()).collect();
        let Some((x, y, z)) = find_string_violation(&inst, &support) else {
            let cover: Cover = inst.vertices().filter(|&v| weights[v].is_zero()).collect();
            let solution = Solution::from_cover(&inst, cover)?;
            return Ok(LocalRatioResult { solution, steps });
        };
        let triple = [x, y, z];
        let eps = triple.iter().map(|&v| weights[v]).min().unwrap();
        let zeroed = subtract(&mut weights, &triple, eps);
        if zeroed.is_empty() || steps.len() > inst.len() {
            return Err(Error::Invariant("local-ratio round did not shrink the support".into()));
        }
        steps.push(LocalRatioStep { vertices: triple.to_vec(), epsilon: eps });
    }
}
