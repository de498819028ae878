//! Blocks, carriers, convexity and covers.

use std::collections::VecDeque;

use crate::coloring::{Coloring, Cover};
use crate::error::{Error, Result};
use crate::instance::{ColorId, Instance, Rooted, Vertex};
use crate::weight::Weight;

fn check_len(inst: &Instance, col: &Coloring) -> Result<()> {
    if col.len() != inst.len() {
        return Err(Error::SizeMismatch { expected: inst.len(), got: col.len() });
    }
    Ok(())
}

/// Number of maximal monochromatic connected sets of color `d`.
pub fn count_blocks(inst: &Instance, col: &Coloring, d: ColorId) -> usize {
    let members = (0..col.len()).filter(|&v| col.get(v) == Some(d)).count();
    let inner_edges = inst.edges().filter(|&(a, b)| col.get(a) == Some(d) && col.get(b) == Some(d)).count();
    // induced subgraph of a tree is a forest
    members - inner_edges
}

/// Total excess blocks, `sum_d (n_b(d) - 1)` over used colors.
pub fn violations(inst: &Instance, col: &Coloring) -> usize {
    col.used_colors().into_iter().map(|d| count_blocks(inst, col, d) - 1).sum()
}

/// Convexity by block counting; meaningful for total colorings.
pub fn is_convex_by_blocks(inst: &Instance, col: &Coloring) -> bool {
    violations(inst, col) == 0
}

/// Vertex set of the minimal subtree containing `set`, ascending.
pub fn carrier(inst: &Instance, set: &[Vertex]) -> Result<Vec<Vertex>> {
    let &first = set.first().ok_or(Error::EmptySet)?;
    if let Some(&bad) = set.iter().find(|&&v| v >= inst.len()) {
        return Err(Error::VertexOutOfRange(bad));
    }
    let rooted = Rooted::new(inst, first);
    let mut count = vec![0usize; inst.len()];
    for &v in set {
        count[v] = 1;
    }
    for &v in rooted.order.iter().rev() {
        if let Some(p) = rooted.parent[v] {
            count[p] += count[v];
        }
    }
    // rooted inside the set, so the carrier is exactly the vertices with a member below
    Ok(inst.vertices().filter(|&v| count[v] > 0).collect())
}

/// Per-color carriers of a (partial) coloring, all computed in one
/// `O(n c)` sweep of the tree rooted at vertex 0.
#[derive(Debug, Clone)]
pub struct Carriers {
    colors: usize,
    below: Vec<u32>,
    total: Vec<u32>,
    root: Vec<Option<Vertex>>,
    rooted: Rooted,
}

impl Carriers {
    pub fn new(inst: &Instance, col: &Coloring) -> Carriers {
        Carriers::with_root(inst, col, 0)
    }

    pub fn with_root(inst: &Instance, col: &Coloring, root: Vertex) -> Carriers {
        let n = inst.len();
        let c = inst.palette_len();
        let rooted = Rooted::new(inst, root);
        let mut below = vec![0u32; n * c];
        let mut total = vec![0u32; c];
        for v in 0..n {
            if let Some(d) = col.get(v) {
                below[v * c + d] = 1;
                total[d] += 1;
            }
        }
        for &v in rooted.order.iter().rev() {
            if let Some(p) = rooted.parent[v] {
                for d in 0..c {
                    below[p * c + d] += below[v * c + d];
                }
            }
        }
        let mut croot = vec![None; c];
        // vertices holding every d-vertex below them form a path from the root;
        // the last one in BFS order is the carrier's root
        for &v in &rooted.order {
            for d in 0..c {
                if total[d] > 0 && below[v * c + d] == total[d] {
                    croot[d] = Some(v);
                }
            }
        }
        Carriers { colors: c, below, total, root: croot, rooted }
    }

    pub fn contains(&self, v: Vertex, d: ColorId) -> bool {
        let b = self.below[v * self.colors + d];
        b > 0 && (b < self.total[d] || self.root[d] == Some(v))
    }

    /// The vertex of `carrier(d)` closest to the sweep root.
    pub fn root(&self, d: ColorId) -> Option<Vertex> {
        self.root[d]
    }

    pub fn rooted(&self) -> &Rooted {
        &self.rooted
    }

    /// Number of `d`-colored vertices.
    pub fn size(&self, d: ColorId) -> usize {
        self.total[d] as usize
    }

    /// Colors whose carrier contains `v`, ascending.
    pub fn colors_at(&self, v: Vertex) -> impl Iterator<Item = ColorId> + '_ {
        (0..self.colors).filter(move |&d| self.contains(v, d))
    }

    pub fn members(&self, d: ColorId) -> Vec<Vertex> {
        (0..self.rooted.order.len()).filter(|&v| self.contains(v, d)).collect()
    }
}

/// Convexity via the disjointness property; valid for partial and total colorings.
pub fn is_convex(inst: &Instance, col: &Coloring) -> bool {
    if col.len() != inst.len() {
        return false;
    }
    let carriers = Carriers::new(inst, col);
    inst.vertices().all(|v| carriers.colors_at(v).nth(1).is_none())
}

/// Whether `inst.color` restricted to `V \ cover` is convex. `O(n c)`.
pub fn is_cover(inst: &Instance, cover: &Cover) -> bool {
    is_convex(inst, &inst.coloring().without(cover))
}

/// Extends a convex partial coloring to a total convex one.
///
/// Each vertex takes the color of the nearest carrier, ties going to the
/// smaller color id. The empty coloring becomes the constant coloring with
/// color 0.
pub fn complete_to_convex(inst: &Instance, col: &Coloring) -> Result<Coloring> {
    check_len(inst, col)?;
    let used = col.used_colors();
    if used.is_empty() {
        return Ok(Coloring::constant(inst.len(), 0));
    }
    let carriers = Carriers::new(inst, col);
    if inst.vertices().any(|v| carriers.colors_at(v).nth(1).is_some()) {
        return Err(Error::NotConvex);
    }
    let n = inst.len();
    let mut best: Vec<Option<(usize, ColorId)>> = vec![None; n];
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for &d in &used {
        dist.iter_mut().for_each(|x| *x = usize::MAX);
        for v in carriers.members(d) {
            dist[v] = 0;
            queue.push_back(v);
        }
        while let Some(v) = queue.pop_front() {
            for &u in inst.neighbors(v) {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        for v in 0..n {
            // colors are visited ascending, so strict improvement keeps the smaller id on ties
            if best[v].is_none_or(|(bd, _)| dist[v] < bd) {
                best[v] = Some((dist[v], d));
            }
        }
    }
    Ok(Coloring::total(best.into_iter().map(|b| b.expect("tree is connected").1).collect()))
}

/// The overwritten set `X_C(C')`: colored vertices that `recolored` uncolors or changes.
pub fn overwritten(inst: &Instance, recolored: &Coloring) -> Cover {
    inst.vertices()
        .filter(|&v| inst.color(v).is_some() && recolored.get(v) != inst.color(v))
        .collect()
}

/// `cost_C(C') = w(X_C(C'))`.
pub fn recoloring_cost(inst: &Instance, recolored: &Coloring) -> Weight {
    overwritten(inst, recolored).weight(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{validate, RawInstance, SupportPolicy};
    use crate::fixtures::{six_leaf_star, string};

    #[test]
    fn block_counts() {
        let rgr = string("RGR", &[1, 1, 1]);
        assert_eq!(count_blocks(&rgr, &rgr.coloring(), 0), 2);
        assert_eq!(count_blocks(&rgr, &rgr.coloring(), 1), 1);
        let rrr = string("RRR", &[1, 1, 1]);
        assert_eq!(count_blocks(&rrr, &rrr.coloring(), 0), 1);
        // a color outside the used set has no blocks
        let rgrb = validate(
            &RawInstance::string([(Some("R"), 1), (Some("G"), 1), (Some("R"), 1), (Some("B"), 0)]),
            SupportPolicy::Derive,
        )
        .unwrap();
        assert_eq!(count_blocks(&rgrb, &rgrb.coloring(), 2), 0);
    }

    #[test]
    fn violation_counts() {
        let rgr = string("RGR", &[1, 1, 1]);
        assert_eq!(violations(&rgr, &rgr.coloring()), 1);
        let rgrg = string("RGRG", &[1, 1, 1, 1]);
        assert_eq!(violations(&rgrg, &rgrg.coloring()), 2);
        let rrg = string("RRG", &[1, 1, 1]);
        assert_eq!(violations(&rrg, &rrg.coloring()), 0);
    }

    #[test]
    fn carriers_of_sets() {
        let rgr = string("RGR", &[1, 1, 1]);
        assert_eq!(carrier(&rgr, &[0, 2]).unwrap(), [0, 1, 2]);
        assert_eq!(carrier(&rgr, &[1]).unwrap(), [1]);
        assert!(matches!(carrier(&rgr, &[]), Err(Error::EmptySet)));
        let star = six_leaf_star();
        // leaves 1,2 are the R leaves, 0 is the center
        assert_eq!(carrier(&star, &[1, 2]).unwrap(), [0, 1, 2]);
    }

    #[test]
    fn convexity_examples() {
        let rgr = string("RGR", &[1, 1, 1]);
        assert!(!is_convex(&rgr, &rgr.coloring()));
        let rrg = string("RRG", &[1, 1, 1]);
        assert!(is_convex(&rrg, &rrg.coloring()));
        let star = six_leaf_star();
        let mut partial = star.coloring();
        partial.set(5, None);
        partial.set(6, None);
        assert!(!is_convex(&star, &partial));
    }

    #[test]
    fn cover_examples() {
        let rgr = string("RGR", &[1, 1, 1]);
        assert!(is_cover(&rgr, &[1].into_iter().collect()));
        assert!(!is_cover(&rgr, &Cover::empty()));
        assert!(is_cover(&rgr, &rgr.vertices().collect()));
    }

    #[test]
    fn completion_examples() {
        let rgr = string("RGR", &[1, 1, 1]);
        let part = rgr.coloring().without(&[1].into_iter().collect());
        assert_eq!(complete_to_convex(&rgr, &part).unwrap(), Coloring::total(vec![0, 0, 0]));

        let rxg = string("RGG", &[1, 1, 1]);
        let part = rxg.coloring().without(&[1].into_iter().collect());
        let full = complete_to_convex(&rxg, &part).unwrap();
        assert!(full == Coloring::total(vec![0, 0, 1]) || full == Coloring::total(vec![0, 1, 1]));
        assert!(is_convex(&rxg, &full));

        let star = six_leaf_star();
        let mut one = Coloring::new(vec![None; 7]);
        one.set(1, Some(0));
        assert_eq!(complete_to_convex(&star, &one).unwrap(), Coloring::constant(7, 0));

        assert!(matches!(complete_to_convex(&rgr, &rgr.coloring()), Err(Error::NotConvex)));
        let empty = Coloring::new(vec![None; 3]);
        assert_eq!(complete_to_convex(&rgr, &empty).unwrap(), Coloring::constant(3, 0));
    }

    #[test]
    fn recoloring_cost_examples() {
        let rgr = string("RGR", &[1, 1, 1]);
        assert_eq!(recoloring_cost(&rgr, &Coloring::total(vec![0, 0, 0])), Weight(1));
        assert_eq!(recoloring_cost(&rgr, &rgr.coloring()), Weight(0));
        let heavy = string("RGR", &[3, 1, 1]);
        assert_eq!(recoloring_cost(&heavy, &Coloring::total(vec![1, 1, 1])), Weight(4));
    }
}
