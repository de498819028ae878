//! Penalties and the per-color lower bound.
//!
//! The penalty of a connected set `U` for color `d` is the weight that must be
//! overwritten to make `U` the unique `d`-block: non-`d` vertices inside `U`
//! plus `d` vertices outside it. Summing the best achievable penalty over all
//! colors gives at most twice the optimal recoloring cost.

use crate::coloring::Coloring;
use crate::convexity::is_convex;
use crate::error::{Error, Result};
use crate::instance::{ColorId, Instance, Rooted, Vertex};
use crate::weight::{Rational, Weight};

fn is_connected(inst: &Instance, set: &[Vertex]) -> bool {
    if set.is_empty() {
        return true;
    }
    let mut inside = vec![false; inst.len()];
    for &v in set {
        inside[v] = true;
    }
    let members = inside.iter().filter(|&&b| b).count();
    let inner_edges = inst.edges().filter(|&(a, b)| inside[a] && inside[b]).count();
    inner_edges + 1 == members
}

fn penalty_unchecked(inst: &Instance, d: ColorId, inside: &[bool]) -> Weight {
    inst.vertices()
        .filter(|&v| inside[v] != (inst.color(v) == Some(d)))
        .map(|v| inst.weight(v))
        .sum()
}

/// `w(U \ C^-1(d)) + w(C^-1(d) \ U)` for a connected (or empty) `U`.
pub fn penalty_of_set(inst: &Instance, d: ColorId, set: &[Vertex]) -> Result<Weight> {
    if let Some(&bad) = set.iter().find(|&&v| v >= inst.len()) {
        return Err(Error::VertexOutOfRange(bad));
    }
    if !is_connected(inst, set) {
        return Err(Error::Disconnected);
    }
    let mut inside = vec![false; inst.len()];
    for &v in set {
        inside[v] = true;
    }
    Ok(penalty_unchecked(inst, d, &inside))
}

/// Sum over the palette of the penalties of the recoloring's color classes.
///
/// Equals twice [`recoloring_cost`](crate::convexity::recoloring_cost)
/// whenever uncolored vertices carry no weight.
pub fn penalty_of_recoloring(inst: &Instance, recolored: &Coloring) -> Result<Weight> {
    if recolored.len() != inst.len() {
        return Err(Error::SizeMismatch { expected: inst.len(), got: recolored.len() });
    }
    if !recolored.is_total() {
        return Err(Error::NotTotal);
    }
    if !is_convex(inst, recolored) {
        return Err(Error::NotConvex);
    }
    Ok((0..inst.palette_len())
        .map(|d| {
            let inside: Vec<bool> = recolored.as_slice().iter().map(|&c| c == Some(d)).collect();
            penalty_unchecked(inst, d, &inside)
        })
        .sum())
}

/// A minimum-penalty block for one color.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BestBlock {
    pub color: ColorId,
    /// Ascending; empty when no nonempty block beats leaving `d` unused.
    pub block: Vec<Vertex>,
    pub p_star: Weight,
}

fn gain(inst: &Instance, d: ColorId, v: Vertex) -> i128 {
    let w = inst.weight(v).0;
    if inst.color(v) == Some(d) {
        w
    } else {
        -w
    }
}

fn class_weight(inst: &Instance, d: ColorId) -> Weight {
    inst.vertices().filter(|&v| inst.color(v) == Some(d)).map(|v| inst.weight(v)).sum()
}

/// Best interval for color `d` on a string, by a single maximum-gain scan.
///
/// Among maximum-gain intervals the one ending first is kept, and a
/// running prefix of gain zero is dropped, so shorter blocks win ties.
pub fn best_block_string(inst: &Instance, d: ColorId) -> Result<BestBlock> {
    if d >= inst.palette_len() {
        return Err(Error::VertexOutOfRange(d));
    }
    Ok(best_blocks_string(inst)?.swap_remove(d))
}

#[derive(Clone, Copy, Default)]
struct Scan {
    run: i128,
    start: usize,
    best_gain: i128,
    best: Option<(usize, usize)>,
    class: i128,
}

/// [`best_block_string`] for every color in one left-to-right pass.
pub fn best_blocks_string(inst: &Instance) -> Result<Vec<BestBlock>> {
    if !inst.is_string() {
        return Err(Error::NotAString);
    }
    let mut scans = vec![Scan::default(); inst.palette_len()];
    for (j, (&w, &c)) in inst.weights().iter().zip(inst.colors()).enumerate() {
        for (d, s) in scans.iter_mut().enumerate() {
            let g = if c == Some(d) {
                s.class += w.0;
                w.0
            } else {
                -w.0
            };
            if s.run <= 0 {
                s.run = g;
                s.start = j;
            } else {
                s.run += g;
            }
            if s.run > s.best_gain {
                s.best_gain = s.run;
                s.best = Some((s.start, j));
            }
        }
    }
    Ok(scans
        .into_iter()
        .enumerate()
        .map(|(d, s)| BestBlock {
            color: d,
            block: s.best.map(|(i, j)| (i..=j).collect()).unwrap_or_default(),
            p_star: Weight(s.class - s.best_gain),
        })
        .collect())
}

/// Best connected vertex set for color `d` on any tree: a maximum-gain
/// connected subtree, found in one rooted sweep.
pub fn best_block_tree(inst: &Instance, d: ColorId) -> BestBlock {
    let rooted = Rooted::new(inst, 0);
    let n = inst.len();
    let mut dp = vec![0i128; n];
    let mut best_gain = 0i128;
    let mut best_top = None;
    for &v in rooted.order.iter().rev() {
        dp[v] += gain(inst, d, v);
        if dp[v] > best_gain {
            best_gain = dp[v];
            best_top = Some(v);
        }
        if let Some(p) = rooted.parent[v] {
            dp[p] += dp[v].max(0);
        }
    }
    let mut block = Vec::new();
    if let Some(top) = best_top {
        let mut stack = vec![top];
        while let Some(v) = stack.pop() {
            block.push(v);
            stack.extend(rooted.children(inst, v).filter(|&u| dp[u] > 0));
        }
        block.sort_unstable();
    }
    BestBlock { color: d, block, p_star: class_weight(inst, d) - Weight(best_gain) }
}

/// Per-color best blocks and the aggregate lower bound `sum_d p*_d / 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PenaltyReport {
    pub per_color: Vec<BestBlock>,
    pub sum_p_star: Weight,
    /// `sum_p_star / 2`, in the instance's true units.
    pub lower_bound: Rational,
}

/// Lower bound on the optimal recoloring cost. Strings use the interval scan,
/// trees the subtree sweep.
pub fn lower_bound(inst: &Instance) -> PenaltyReport {
    let per_color: Vec<BestBlock> = if inst.is_string() {
        best_blocks_string(inst).expect("string instance")
    } else {
        (0..inst.palette_len()).map(|d| best_block_tree(inst, d)).collect()
    };
    let sum_p_star: Weight = per_color.iter().map(|b| b.p_star).sum();
    let lower_bound = Rational::new(sum_p_star.0, 2 * inst.scale());
    PenaltyReport { per_color, sum_p_star, lower_bound }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convexity::recoloring_cost;
    use crate::fixtures::{poor_bound_star, six_leaf_star, string};

    /// Minimum over all intervals (and the empty one), by enumeration.
    fn interval_brute_force(inst: &Instance, d: ColorId) -> Weight {
        let n = inst.len();
        let mut best = penalty_of_set(inst, d, &[]).unwrap();
        for i in 0..n {
            for j in i..n {
                let set: Vec<usize> = (i..=j).collect();
                best = best.min(penalty_of_set(inst, d, &set).unwrap());
            }
        }
        best
    }

    #[test]
    fn penalty_of_set_examples() {
        let rgr = string("RGR", &[1, 1, 1]);
        assert_eq!(penalty_of_set(&rgr, 0, &[0, 1]).unwrap(), Weight(2));
        assert_eq!(penalty_of_set(&rgr, 0, &[0, 1, 2]).unwrap(), Weight(1));
        let rgrb = crate::instance::validate(
            &crate::RawInstance::string([(Some("R"), 1), (Some("G"), 1), (Some("R"), 1), (Some("B"), 0)]),
            crate::SupportPolicy::Derive,
        )
        .unwrap();
        assert_eq!(penalty_of_set(&rgrb, 2, &[]).unwrap(), Weight(0));
        assert!(matches!(penalty_of_set(&rgr, 0, &[0, 2]), Err(Error::Disconnected)));
    }

    #[test]
    fn penalty_of_recoloring_is_twice_cost() {
        let rgr = string("RGR", &[1, 1, 1]);
        let all_r = Coloring::total(vec![0, 0, 0]);
        assert_eq!(penalty_of_recoloring(&rgr, &all_r).unwrap(), Weight(2));
        assert_eq!(recoloring_cost(&rgr, &all_r), Weight(1));
        let rrg = string("RRG", &[1, 1, 1]);
        assert_eq!(penalty_of_recoloring(&rrg, &rrg.coloring()).unwrap(), Weight(0));
        assert!(matches!(penalty_of_recoloring(&rgr, &rgr.coloring()), Err(Error::NotConvex)));
    }

    #[test]
    fn three_color_recoloring_penalties_one_two_three() {
        // G B R B B recolored to G G R R R: one blue vertex joins green, two
        // join red, and blue disappears.
        let inst = string("GBRBB", &[1, 1, 1, 1, 1]);
        let recolored = Coloring::total(vec![0, 0, 2, 2, 2]);
        let mut per_color: Vec<Weight> = (0..3)
            .map(|d| penalty_of_set(&inst, d, &recolored.class(d)).unwrap())
            .collect();
        per_color.sort();
        assert_eq!(per_color, [Weight(1), Weight(2), Weight(3)]);
        assert_eq!(penalty_of_recoloring(&inst, &recolored).unwrap(), Weight(6));
        assert_eq!(recoloring_cost(&inst, &recolored), Weight(3));
    }

    #[test]
    fn best_block_string_examples() {
        let rgrg = string("RGRG", &[1, 1, 1, 1]);
        let b = best_block_string(&rgrg, 0).unwrap();
        assert_eq!(b.p_star, Weight(1));
        assert!([vec![0], vec![2], vec![0, 1, 2]].contains(&b.block));
        assert_eq!(b.p_star, interval_brute_force(&rgrg, 0));

        let rrr = string("RRR", &[1, 1, 1]);
        let b = best_block_string(&rrr, 0).unwrap();
        assert_eq!((b.block, b.p_star), (vec![0, 1, 2], Weight(0)));

        let heavy = string("RGRG", &[3, 1, 1, 3]);
        let b = best_block_string(&heavy, 1).unwrap();
        assert_eq!((b.block, b.p_star), (vec![3], Weight(1)));
        assert_eq!(b.p_star, interval_brute_force(&heavy, 1));

        assert!(matches!(best_block_string(&six_leaf_star(), 0), Err(Error::NotAString)));
    }

    #[test]
    fn best_block_tree_examples() {
        let star = six_leaf_star();
        let b = best_block_tree(&star, 0);
        assert_eq!((b.block, b.p_star), (vec![0, 1, 2], Weight(0)));

        let single = string("R", &[4]);
        let b = best_block_tree(&single, 0);
        assert_eq!((b.block, b.p_star), (vec![0], Weight(0)));

        let rgr = string("RGR", &[1, 5, 1]);
        let b = best_block_tree(&rgr, 0);
        assert!(b.block == [0] || b.block == [2]);
        assert_eq!(b.p_star, Weight(1));
    }

    #[test]
    fn lower_bound_examples() {
        let rgrg = string("RGRG", &[1, 1, 1, 1]);
        let report = lower_bound(&rgrg);
        assert_eq!(report.sum_p_star, Weight(2));
        assert_eq!(report.lower_bound, Rational::from_integer(1));

        let convex = string("RRGGB", &[1, 2, 3, 4, 5]);
        assert_eq!(lower_bound(&convex).sum_p_star, Weight(0));

        // loose on trees: the bound only charges the light center
        let star = poor_bound_star();
        let report = lower_bound(&star);
        assert_eq!(report.lower_bound, Rational::from_integer(1));
    }

    #[test]
    fn fractional_lower_bound_uses_true_units() {
        let mut raw = crate::RawInstance::string([(Some("R"), 1), (Some("G"), 1), (Some("R"), 1)]);
        raw.vertices[1].weight = Rational::new(1, 3);
        let inst = crate::validate(&raw, crate::SupportPolicy::AsIs).unwrap();
        let report = lower_bound(&inst);
        // p*_R = 1/3 (absorb the light G), p*_G = 0
        assert_eq!(report.lower_bound, Rational::new(1, 6));
    }
}
