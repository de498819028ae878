//! Local-ratio approximations for colored trees.
//!
//! [`four_tree_approx`] discounts two intersecting monochromatic pairs per
//! round. [`three_tree_approx`] classifies the instance into one of four
//! cases per round and either discounts a 3-effective vertex set (cases 1
//! and 2) or shrinks the tree while preserving optimal solutions (cases 3a
//! and 3b). Reductions are recorded in a [`ReductionTrace`] and unwound in
//! reverse with [`update`] to turn a cover of the smallest instance into a
//! cover of the input.

use std::collections::BTreeSet;

use crate::coloring::{Coloring, Cover};
use crate::convexity::{carrier, is_cover, overwritten, recoloring_cost, Carriers};
use crate::error::{Error, Result};
use crate::instance::{ColorId, Instance, Rooted, Vertex};
use crate::solution::{subtract, LocalRatioStep, Solution};
use crate::string_approx::LocalRatioResult;
use crate::weight::Weight;

/// Which reduction applies to an instance, with the vertices that justify it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CaseWitness {
    /// `V \ support(w)` is already a cover.
    Cover,
    /// Support vertices `x, y, z` with `y` on the path from `x` to `z` and
    /// `C(x) = C(z) != C(y)`.
    Case1 { x: Vertex, y: Vertex, z: Vertex },
    /// A zero-weight `center` inside the carriers of three colors, with one
    /// designated pair per color whose path runs through the center.
    Case2 { center: Vertex, colors: [ColorId; 3], pairs: [(Vertex, Vertex); 3] },
    /// The subtree at `root` holds color `d0` only and `d0` occurs nowhere else.
    Case3a { root: Vertex, d0: ColorId, subtree: Vec<Vertex> },
    /// The subtree at `root` holds exactly the colors `d0` and `d_prime`,
    /// `d0` occurs nowhere else, and `root` has weight zero.
    Case3b { root: Vertex, d0: ColorId, d_prime: ColorId, parent: Option<Vertex>, subtree: Vec<Vertex> },
}

impl CaseWitness {
    pub fn tag(&self) -> &'static str {
        match self {
            CaseWitness::Cover => "cover",
            CaseWitness::Case1 { .. } => "case1",
            CaseWitness::Case2 { .. } => "case2",
            CaseWitness::Case3a { .. } => "case3a",
            CaseWitness::Case3b { .. } => "case3b",
        }
    }
}

/// The three canonical recolorings of the removed subtree and the two-vertex
/// gadget that replaces it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetRecord {
    pub d0: ColorId,
    pub d_prime: ColorId,
    /// Everything `d0`: overwrite all `d_prime` vertices.
    pub c_high: Weight,
    /// Cheapest of `C_high` and the best bicoloring with the subtree root colored `d_prime`.
    pub c_medium: Weight,
    /// Best bicoloring overall.
    pub c_min: Weight,
    pub x_high: Cover,
    pub x_medium: Cover,
    pub x_min: Cover,
    /// Gadget root and its single child, as indices of the reduced instance.
    pub gadget_root: Vertex,
    pub gadget_leaf: Vertex,
    pub removed: Vec<Vertex>,
}

impl GadgetRecord {
    pub fn root_weight(&self) -> Weight {
        self.c_medium - self.c_min
    }

    pub fn leaf_weight(&self) -> Weight {
        self.c_high - self.c_min
    }
}

/// Bookkeeping for one reduction round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub witness: CaseWitness,
    /// Amount discounted in cases 1 and 2.
    pub epsilon: Option<Weight>,
    pub discounted: Vec<Vertex>,
    /// Vertices that left the support this round (cases 1 and 2).
    pub zeroed: Vec<Vertex>,
    pub gadget: Option<GadgetRecord>,
    /// Reduced index -> index in this round's instance; `None` marks gadget
    /// vertices. Absent when the tree is unchanged.
    pub vertex_map: Option<Vec<Option<Vertex>>>,
    pub support_before: usize,
    pub support_after: usize,
}

/// All rounds of a [`three_tree_approx`] run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionTrace {
    /// `instances[k]` is the input of round `k`; the last one is the base case.
    pub instances: Vec<Instance>,
    pub rounds: Vec<TraceEntry>,
}

impl ReductionTrace {
    /// Maps a cover of the final instance back to a cover of the first.
    pub fn replay(&self, base_cover: &Cover) -> Result<Cover> {
        let mut x = base_cover.clone();
        for k in (0..self.rounds.len()).rev() {
            x = update(&self.instances[k], &self.instances[k + 1], &self.rounds[k], &x)?;
        }
        Ok(x)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeApproxResult {
    pub solution: Solution,
    pub trace: ReductionTrace,
}

fn require_support_domain(inst: &Instance) -> Result<()> {
    if inst.domain_is_support() {
        Ok(())
    } else {
        Err(Error::Invariant("coloring domain differs from the weight support".into()))
    }
}

/// Labels each vertex by the component of `T - v` it lies in (`v` itself gets `usize::MAX`).
fn components_around(inst: &Instance, v: Vertex) -> Vec<usize> {
    let mut comp = vec![usize::MAX; inst.len()];
    for (i, &start) in inst.neighbors(v).iter().enumerate() {
        comp[start] = i;
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for &u in inst.neighbors(x) {
                if u != v && comp[u] == usize::MAX {
                    comp[u] = i;
                    stack.push(u);
                }
            }
        }
    }
    comp
}

/// Two `d`-colored vertices in different components of `T - v`: the smallest
/// such vertex, then the smallest one in a different component.
fn pair_through(inst: &Instance, col: &Coloring, v: Vertex, d: ColorId) -> Option<(Vertex, Vertex)> {
    let comp = components_around(inst, v);
    let mut members = inst.vertices().filter(|&u| u != v && col.get(u) == Some(d));
    let x = members.next()?;
    let z = members.find(|&u| comp[u] != comp[x])?;
    Some((x, z))
}

/// `(v, v)` when `v` has color `d`, else a pair through `v`.
fn pair_at(inst: &Instance, col: &Coloring, v: Vertex, d: ColorId) -> Option<(Vertex, Vertex)> {
    if col.get(v) == Some(d) {
        Some((v, v))
    } else {
        pair_through(inst, col, v, d)
    }
}

/// Determines which reduction applies, trying case 1, 2, 3a, 3b in that order.
///
/// The coloring is first restricted to `support(w)`. Case 3 roots the tree at
/// vertex 0 and picks the color whose carrier root is deepest (smallest id on
/// ties).
pub fn classify_case(inst: &Instance) -> Result<CaseWitness> {
    let inst = inst.support_normalized();
    let col = inst.coloring();
    let carriers = Carriers::new(&inst, &col);
    if inst.vertices().all(|v| carriers.colors_at(v).nth(1).is_none()) {
        return Ok(CaseWitness::Cover);
    }

    for y in inst.vertices() {
        let Some(cy) = inst.color(y) else { continue };
        if let Some(d) = carriers.colors_at(y).find(|&d| d != cy) {
            let (x, z) = pair_through(&inst, &col, y, d)
                .ok_or_else(|| Error::Invariant("carrier interior vertex without a pair".into()))?;
            return Ok(CaseWitness::Case1 { x, y, z });
        }
    }

    for v in inst.vertices() {
        let here: Vec<ColorId> = carriers.colors_at(v).take(3).collect();
        if here.len() == 3 {
            if !inst.weight(v).is_zero() {
                return Err(Error::Invariant("case 2 center has positive weight".into()));
            }
            let mut pairs = [(0, 0); 3];
            for (slot, &d) in pairs.iter_mut().zip(&here) {
                *slot = pair_through(&inst, &col, v, d)
                    .ok_or_else(|| Error::Invariant("case 2 color without a designated pair".into()))?;
            }
            return Ok(CaseWitness::Case2 { center: v, colors: [here[0], here[1], here[2]], pairs });
        }
    }

    let rooted = carriers.rooted();
    let mut deepest: Option<(usize, ColorId, Vertex)> = None;
    for d in 0..inst.palette_len() {
        if let Some(r) = carriers.root(d) {
            if deepest.is_none_or(|(depth, _, _)| rooted.depth[r] > depth) {
                deepest = Some((rooted.depth[r], d, r));
            }
        }
    }
    let (_, d0, root) = deepest.ok_or_else(|| Error::Invariant("no colored vertex in a non-convex instance".into()))?;
    let subtree = rooted.subtree(&inst, root);
    let present: BTreeSet<ColorId> = subtree.iter().filter_map(|&v| inst.color(v)).collect();
    match present.len() {
        1 => Ok(CaseWitness::Case3a { root, d0, subtree }),
        2 => {
            let d_prime = *present.iter().find(|&&d| d != d0).unwrap();
            if !inst.weight(root).is_zero() {
                return Err(Error::Invariant("case 3b subtree root has positive weight".into()));
            }
            Ok(CaseWitness::Case3b { root, d0, d_prime, parent: rooted.parent[root], subtree })
        }
        _ => Err(Error::Invariant(format!("case 3 subtree holds {} colors", present.len()))),
    }
}

fn on_path(inst: &Instance, a: Vertex, b: Vertex, y: Vertex) -> Result<bool> {
    Ok(carrier(inst, &[a, b])?.binary_search(&y).is_ok())
}

/// Checks that `subtree` is the component of `root` after cutting the edge to `parent`.
fn check_cut_subtree(inst: &Instance, root: Vertex, parent: Option<Vertex>, subtree: &[Vertex]) -> Result<()> {
    let inside: BTreeSet<Vertex> = subtree.iter().copied().collect();
    if subtree.first() != Some(&root) || inside.len() != subtree.len() {
        return Err(Error::InvalidWitness("subtree must list its root first, without repeats".into()));
    }
    for &v in subtree {
        for &u in inst.neighbors(v) {
            if !inside.contains(&u) && !(v == root && Some(u) == parent) {
                return Err(Error::InvalidWitness(format!("vertex {v} has a neighbor {u} outside the subtree")));
            }
        }
    }
    if let Some(p) = parent {
        if inside.contains(&p) || !inst.neighbors(root).contains(&p) {
            return Err(Error::InvalidWitness("parent must be the root's neighbor outside the subtree".into()));
        }
    } else if subtree.len() != inst.len() {
        return Err(Error::InvalidWitness("a subtree without parent must span the tree".into()));
    }
    Ok(())
}

/// Validates a witness against the invariants of its case.
pub fn check_witness(inst: &Instance, witness: &CaseWitness) -> Result<()> {
    let n = inst.len();
    let in_range = |v: Vertex| if v < n { Ok(()) } else { Err(Error::VertexOutOfRange(v)) };
    let bad = |msg: &str| Err(Error::InvalidWitness(msg.into()));
    match witness {
        CaseWitness::Cover => {
            if is_cover(inst, &inst.zero_weight().into_iter().collect()) {
                Ok(())
            } else {
                bad("zero-weight vertices do not form a cover")
            }
        }
        &CaseWitness::Case1 { x, y, z } => {
            for v in [x, y, z] {
                in_range(v)?;
            }
            if [x, y, z].iter().any(|&v| !inst.weight(v).is_positive() || inst.color(v).is_none()) {
                return bad("case 1 vertices must be colored support vertices");
            }
            if inst.color(x) != inst.color(z) || inst.color(x) == inst.color(y) {
                return bad("case 1 needs C(x) = C(z) != C(y)");
            }
            if !on_path(inst, x, z, y)? {
                return bad("case 1 needs y on the path from x to z");
            }
            Ok(())
        }
        CaseWitness::Case2 { center, colors, pairs } => {
            in_range(*center)?;
            if !inst.weight(*center).is_zero() {
                return bad("case 2 center must have weight zero");
            }
            let distinct: BTreeSet<ColorId> = colors.iter().copied().collect();
            if distinct.len() != 3 {
                return bad("case 2 needs three distinct colors");
            }
            for (&(a, b), &d) in pairs.iter().zip(colors) {
                in_range(a)?;
                in_range(b)?;
                if a == b || inst.color(a) != Some(d) || inst.color(b) != Some(d) {
                    return bad("designated pairs must be two vertices of their color");
                }
                if !inst.weight(a).is_positive() || !inst.weight(b).is_positive() {
                    return bad("designated pairs must lie in the support");
                }
                if !on_path(inst, a, b, *center)? {
                    return bad("center must lie on every designated path");
                }
            }
            Ok(())
        }
        CaseWitness::Case3a { root, d0, subtree } => {
            in_range(*root)?;
            let parent = inst.neighbors(*root).iter().copied().find(|u| !subtree.contains(u));
            check_cut_subtree(inst, *root, parent, subtree)?;
            let inside: BTreeSet<Vertex> = subtree.iter().copied().collect();
            for v in inst.vertices() {
                match inst.color(v) {
                    Some(d) if inside.contains(&v) && d != *d0 => return bad("case 3a subtree must hold d0 only"),
                    Some(d) if !inside.contains(&v) && d == *d0 => return bad("d0 must not occur outside the subtree"),
                    _ => {}
                }
            }
            Ok(())
        }
        CaseWitness::Case3b { root, d0, d_prime, parent, subtree } => {
            in_range(*root)?;
            check_cut_subtree(inst, *root, *parent, subtree)?;
            if !inst.weight(*root).is_zero() {
                return bad("case 3b root must have weight zero");
            }
            if d0 == d_prime {
                return bad("case 3b needs two distinct colors");
            }
            let inside: BTreeSet<Vertex> = subtree.iter().copied().collect();
            let (mut seen_d0, mut seen_dp) = (false, false);
            for v in inst.vertices() {
                let Some(d) = inst.color(v) else { continue };
                if inside.contains(&v) {
                    if d == *d0 {
                        seen_d0 = true;
                    } else if d == *d_prime {
                        seen_dp = true;
                    } else {
                        return bad("case 3b subtree must hold only d0 and d'");
                    }
                } else if d == *d0 {
                    return bad("d0 must not occur outside the subtree");
                }
            }
            if !(seen_d0 && seen_dp) {
                return bad("case 3b subtree must hold both d0 and d'");
            }
            Ok(())
        }
    }
}

/// Minimum-cost convex recoloring of a tree with at most two colors, with
/// `root` forced to `root_color`.
///
/// For every vertex `v` below the root the candidate colors the subtree
/// `T(v)` with the other color and everything else with `root_color`; its
/// cost is the `root_color` weight inside `T(v)` plus the other color's
/// weight outside. Leaving everything `root_color` is also a candidate and
/// wins ties.
pub fn bicolored_constrained_opt(inst: &Instance, root: Vertex, root_color: ColorId) -> Result<(Coloring, Weight)> {
    if root >= inst.len() {
        return Err(Error::VertexOutOfRange(root));
    }
    let mut colors: BTreeSet<ColorId> = inst.coloring().used_colors().into_iter().collect();
    colors.insert(root_color);
    if colors.len() > 2 {
        return Err(Error::TooManyColors);
    }
    let other = colors.iter().copied().find(|&d| d != root_color);
    let rooted = Rooted::new(inst, root);
    let n = inst.len();
    let mut same = vec![Weight::ZERO; n];
    let mut diff = vec![Weight::ZERO; n];
    for &v in rooted.order.iter().rev() {
        match inst.color(v) {
            Some(d) if d == root_color => same[v] += inst.weight(v),
            Some(_) => diff[v] += inst.weight(v),
            None => {}
        }
        if let Some(p) = rooted.parent[v] {
            let (s, d) = (same[v], diff[v]);
            same[p] += s;
            diff[p] += d;
        }
    }
    let total_diff = diff[root];
    let mut best_cost = total_diff;
    let mut best_split = None;
    for &v in rooted.order.iter().skip(1) {
        let cost = same[v] + (total_diff - diff[v]);
        if cost < best_cost {
            best_cost = cost;
            best_split = Some(v);
        }
    }
    let mut coloring = Coloring::constant(n, root_color);
    if let (Some(v), Some(other)) = (best_split, other) {
        for u in rooted.subtree(inst, v) {
            coloring.set(u, Some(other));
        }
    }
    debug_assert_eq!(recoloring_cost(inst, &coloring), best_cost);
    Ok((coloring, best_cost))
}

/// Computes `C_high`, `C_medium`, `C_min` for a case 3b witness.
pub fn compute_gadget(inst: &Instance, witness: &CaseWitness) -> Result<GadgetRecord> {
    let CaseWitness::Case3b { d0, d_prime, subtree, .. } = witness else {
        return Err(Error::InvalidWitness(format!("expected case3b, got {}", witness.tag())));
    };
    check_witness(inst, witness)?;
    let (d0, d_prime) = (*d0, *d_prime);
    let (sub, map) = inst.induced(subtree);
    let to_outer = |c: &Cover| -> Cover { c.members().iter().map(|&v| map[v]).collect() };

    let (col_d0, cost_d0) = bicolored_constrained_opt(&sub, 0, d0)?;
    let (col_dp, cost_dp) = bicolored_constrained_opt(&sub, 0, d_prime)?;
    let x_high: Cover = subtree.iter().copied().filter(|&v| inst.color(v) == Some(d_prime)).collect();
    let c_high = x_high.weight(inst);
    let (c_min, x_min) = if cost_d0 <= cost_dp {
        (cost_d0, to_outer(&overwritten(&sub, &col_d0)))
    } else {
        (cost_dp, to_outer(&overwritten(&sub, &col_dp)))
    };
    let (c_medium, x_medium) = if c_high <= cost_dp {
        (c_high, x_high.clone())
    } else {
        (cost_dp, to_outer(&overwritten(&sub, &col_dp)))
    };
    if !(c_min <= c_medium && c_medium <= c_high) {
        return Err(Error::Invariant("gadget costs are out of order".into()));
    }
    let kept = inst.len() - subtree.len();
    let mut removed = subtree.clone();
    removed.sort_unstable();
    Ok(GadgetRecord {
        d0,
        d_prime,
        c_high,
        c_medium,
        c_min,
        x_high,
        x_medium,
        x_min,
        gadget_root: kept,
        gadget_leaf: kept + 1,
        removed,
    })
}

fn support_size(inst: &Instance) -> usize {
    inst.vertices().filter(|&v| inst.weight(v).is_positive()).count()
}

fn discount(inst: &Instance, witness: CaseWitness, vertices: Vec<Vertex>) -> (Instance, TraceEntry) {
    let mut weights = inst.weights().to_vec();
    let eps = vertices.iter().map(|&v| weights[v]).min().unwrap();
    let zeroed = subtract(&mut weights, &vertices, eps);
    let reduced = inst.with_weights(weights);
    let entry = TraceEntry {
        witness,
        epsilon: Some(eps),
        discounted: vertices,
        zeroed,
        gadget: None,
        vertex_map: None,
        support_before: support_size(inst),
        support_after: support_size(&reduced),
    };
    (reduced, entry)
}

/// Id, weight and color of a gadget vertex.
type GadgetCell = (String, Weight, Option<ColorId>);

/// Builds the instance induced by the kept vertices plus an optional gadget
/// hanging from `attach`.
fn rebuild(inst: &Instance, kept: &[Vertex], gadget: Option<(Option<Vertex>, [GadgetCell; 2])>) -> (Instance, Vec<Option<Vertex>>) {
    let mut new_of = vec![usize::MAX; inst.len()];
    for (i, &v) in kept.iter().enumerate() {
        new_of[v] = i;
    }
    let mut ids: Vec<String> = kept.iter().map(|&v| inst.id(v).to_string()).collect();
    let mut weights: Vec<Weight> = kept.iter().map(|&v| inst.weight(v)).collect();
    let mut colors: Vec<Option<ColorId>> = kept.iter().map(|&v| inst.color(v)).collect();
    let mut adj: Vec<Vec<Vertex>> = kept
        .iter()
        .map(|&v| inst.neighbors(v).iter().filter(|&&u| new_of[u] != usize::MAX).map(|&u| new_of[u]).collect())
        .collect();
    let mut map: Vec<Option<Vertex>> = kept.iter().map(|&v| Some(v)).collect();
    if let Some((attach, parts)) = gadget {
        let g_root = kept.len();
        let g_leaf = g_root + 1;
        for (id, w, c) in parts {
            ids.push(id);
            weights.push(w);
            colors.push(if w.is_positive() { c } else { None });
            map.push(None);
        }
        adj.push(vec![g_leaf]);
        adj.push(vec![g_root]);
        if let Some(s) = attach {
            let s_new = new_of[s];
            adj[s_new].push(g_root);
            adj[g_root].insert(0, s_new);
        }
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    let reduced = Instance::from_parts(ids, inst.palette().to_vec(), adj, weights, colors, inst.scale());
    (reduced, map)
}

/// Applies one reduction. The instance's coloring domain must equal its support.
pub fn reduce(inst: &Instance, witness: CaseWitness) -> Result<(Instance, TraceEntry)> {
    require_support_domain(inst)?;
    check_witness(inst, &witness)?;
    let (reduced, entry) = match &witness {
        CaseWitness::Cover => return Err(Error::InvalidWitness("nothing to reduce: already a cover".into())),
        &CaseWitness::Case1 { x, y, z } => discount(inst, witness, vec![x, y, z]),
        CaseWitness::Case2 { pairs, .. } => {
            let six: Vec<Vertex> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
            discount(inst, witness, six)
        }
        CaseWitness::Case3a { subtree, .. } => {
            let inside: BTreeSet<Vertex> = subtree.iter().copied().collect();
            let kept: Vec<Vertex> = inst.vertices().filter(|v| !inside.contains(v)).collect();
            let (reduced, map) = rebuild(inst, &kept, None);
            let entry = TraceEntry {
                epsilon: None,
                discounted: Vec::new(),
                zeroed: Vec::new(),
                gadget: None,
                vertex_map: Some(map),
                support_before: support_size(inst),
                support_after: support_size(&reduced),
                witness,
            };
            (reduced, entry)
        }
        CaseWitness::Case3b { root, parent, subtree, .. } => {
            let gadget = compute_gadget(inst, &witness)?;
            let inside: BTreeSet<Vertex> = subtree.iter().copied().collect();
            let kept: Vec<Vertex> = inst.vertices().filter(|v| !inside.contains(v)).collect();
            let root_id = inst.id(*root).to_string();
            let parts = [
                (root_id.clone(), gadget.root_weight(), Some(gadget.d0)),
                (format!("{root_id}#v0"), gadget.leaf_weight(), Some(gadget.d_prime)),
            ];
            let (reduced, map) = rebuild(inst, &kept, Some((*parent, parts)));
            debug_assert_eq!((gadget.gadget_root, gadget.gadget_leaf), (kept.len(), kept.len() + 1));
            let entry = TraceEntry {
                epsilon: None,
                discounted: Vec::new(),
                zeroed: Vec::new(),
                vertex_map: Some(map),
                support_before: support_size(inst),
                support_after: support_size(&reduced),
                gadget: Some(gadget),
                witness,
            };
            (reduced, entry)
        }
    };
    if entry.support_after >= entry.support_before {
        return Err(Error::Invariant(format!("{} reduction did not shrink the support", entry.witness.tag())));
    }
    Ok((reduced, entry))
}

/// Maps a cover of the reduced instance back to a cover of `inst`.
///
/// Cases 1 and 2 keep `X'` when it already covers `inst`; otherwise the
/// vertices this round zeroed are added back, then dropped again one by one
/// (ascending) while the set stays a cover. Case 3a keeps `X'`. Case 3b
/// replaces the gadget part of `X'` by the overwrite set of `C_min`,
/// `C_medium` or `C_high`: the cheapest one that yields a cover, with the
/// gadget state's own candidate (nothing -> `C_min`, root -> `C_medium`,
/// leaf -> `C_high`) first among equal costs.
pub fn update(inst: &Instance, reduced: &Instance, entry: &TraceEntry, x_prime: &Cover) -> Result<Cover> {
    if let Some(&bad) = x_prime.members().iter().find(|&&v| v >= reduced.len()) {
        return Err(Error::VertexOutOfRange(bad));
    }
    if !is_cover(reduced, x_prime) {
        return Err(Error::NotACover);
    }
    let x = match (&entry.witness, &entry.vertex_map, &entry.gadget) {
        (CaseWitness::Case1 { .. } | CaseWitness::Case2 { .. }, _, _) => {
            if is_cover(inst, x_prime) {
                x_prime.clone()
            } else {
                let mut x = x_prime.union(&entry.zeroed.iter().copied().collect());
                for &z in &entry.zeroed {
                    if x_prime.contains(z) {
                        continue;
                    }
                    let mut trial = x.clone();
                    trial.remove(z);
                    if is_cover(inst, &trial) {
                        x = trial;
                    }
                }
                x
            }
        }
        (CaseWitness::Case3a { .. }, Some(map), _) => x_prime.members().iter().filter_map(|&v| map[v]).collect(),
        (CaseWitness::Case3b { .. }, Some(map), Some(g)) => {
            let hat: Cover = x_prime.members().iter().filter_map(|&v| map[v]).collect();
            let root_in = x_prime.contains(g.gadget_root) && reduced.color(g.gadget_root).is_some();
            let leaf_in = x_prime.contains(g.gadget_leaf) && reduced.color(g.gadget_leaf).is_some();
            // both gadget vertices overwritten: the root can always be restored,
            // its color d0 occurs nowhere else
            let mapped = match (root_in, leaf_in) {
                (_, true) => 2,
                (true, false) => 1,
                (false, false) => 0,
            };
            let candidates = [(g.c_min, &g.x_min), (g.c_medium, &g.x_medium), (g.c_high, &g.x_high)];
            let mut order: Vec<usize> = vec![0, 1, 2];
            order.sort_by_key(|&i| (candidates[i].0, i != mapped, i));
            let chosen = order
                .into_iter()
                .map(|i| (i, hat.union(candidates[i].1)))
                .find(|(_, x)| is_cover(inst, x))
                .ok_or_else(|| Error::Invariant("no gadget expansion yields a cover".into()))?;
            if candidates[chosen.0].0 > candidates[mapped].0 {
                return Err(Error::Invariant("gadget expansion costs more than the gadget charged".into()));
            }
            chosen.1
        }
        _ => return Err(Error::InvalidWitness("trace entry is missing its reduction data".into())),
    };
    if !is_cover(inst, &x) {
        return Err(Error::Invariant(format!("{} update did not produce a cover", entry.witness.tag())));
    }
    Ok(x)
}

/// The local-ratio 4-approximation for trees.
///
/// Each round takes the first vertex lying in two carriers, the two smallest
/// such colors, a monochromatic pair of each color whose carrier contains the
/// vertex, and discounts the (up to four) distinct vertices.
pub fn four_tree_approx(inst: &Instance) -> Result<LocalRatioResult> {
    let inst = inst.support_normalized();
    let mut weights = inst.weights().to_vec();
    let mut steps = Vec::new();
    loop {
        let current = inst.with_weights(weights.clone());
        let col = current.coloring();
        let carriers = Carriers::new(&current, &col);
        let hit = inst.vertices().find_map(|v| {
            let mut here = carriers.colors_at(v);
            match (here.next(), here.next()) {
                (Some(a), Some(b)) => Some((v, a, b)),
                _ => None,
            }
        });
        let Some((v, d1, d2)) = hit else {
            let cover: Cover = inst.vertices().filter(|&u| weights[u].is_zero()).collect();
            let solution = Solution::from_cover(&inst, cover)?;
            return Ok(LocalRatioResult { solution, steps });
        };
        let missing = || Error::Invariant("carrier vertex without a monochromatic pair".into());
        let (x1, x2) = pair_at(&current, &col, v, d1).ok_or_else(missing)?;
        let (y1, y2) = pair_at(&current, &col, v, d2).ok_or_else(missing)?;
        let mut set = vec![x1, x2, y1, y2];
        set.sort_unstable();
        set.dedup();
        let eps = set.iter().map(|&u| weights[u]).min().unwrap();
        let zeroed = subtract(&mut weights, &set, eps);
        if zeroed.is_empty() || steps.len() > inst.len() {
            return Err(Error::Invariant("local-ratio round did not shrink the support".into()));
        }
        steps.push(LocalRatioStep { vertices: set, epsilon: eps });
    }
}

/// The 3-approximation for trees: classify, reduce, recurse on the smaller
/// instance, then unwind the trace.
pub fn three_tree_approx(inst: &Instance) -> Result<TreeApproxResult> {
    let start = inst.support_normalized();
    let limit = start.len();
    let mut instances = vec![start.clone()];
    let mut rounds = Vec::new();
    loop {
        let current = instances.last().unwrap();
        let witness = classify_case(current)?;
        if witness == CaseWitness::Cover {
            break;
        }
        if rounds.len() >= limit {
            return Err(Error::Invariant(format!("more than n = {limit} reduction rounds")));
        }
        let (next, entry) = reduce(current, witness)?;
        rounds.push(entry);
        instances.push(next);
    }
    let base = instances.last().unwrap();
    let base_cover: Cover = base.zero_weight().into_iter().collect();
    let trace = ReductionTrace { instances, rounds };
    let cover = trace.replay(&base_cover)?;
    let solution = Solution::from_cover(&start, cover)?;
    Ok(TreeApproxResult { solution, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convexity::is_convex;
    use crate::fixtures::{caterpillar, gadget_three_two_one, six_leaf_star, string};

    #[test]
    fn classify_star_as_case2() {
        let star = six_leaf_star();
        let w = classify_case(&star).unwrap();
        assert_eq!(w, CaseWitness::Case2 { center: 0, colors: [0, 1, 2], pairs: [(1, 2), (3, 4), (5, 6)] });
    }

    #[test]
    fn classify_rgr_as_case1() {
        let rgr = string("RGR", &[1, 1, 1]);
        assert_eq!(classify_case(&rgr).unwrap(), CaseWitness::Case1 { x: 0, y: 1, z: 2 });
    }

    #[test]
    fn classify_caterpillar_as_case3b() {
        let cat = caterpillar();
        let w = classify_case(&cat).unwrap();
        assert_eq!(
            w,
            CaseWitness::Case3b { root: 2, d0: 1, d_prime: 0, parent: Some(1), subtree: vec![2, 3, 4, 5] }
        );
    }

    #[test]
    fn classify_convex_as_cover_and_pure_subtree_as_case3a() {
        assert_eq!(classify_case(&string("RRG", &[1, 1, 1])).unwrap(), CaseWitness::Cover);
        // X on both sides of a zero-weight junction, a pure-Y subtree elsewhere
        let inst = crate::fixtures::tree(
            &[("r", 1, Some("X")), ("j", 0, None), ("x", 1, Some("X")), ("y1", 1, Some("Y")), ("q", 0, None), ("y2", 1, Some("Y")), ("z", 1, Some("Z")), ("z2", 1, Some("Z"))],
            &[("r", "j"), ("j", "x"), ("j", "q"), ("q", "y1"), ("q", "y2"), ("j", "z"), ("r", "z2")],
        );
        let w = classify_case(&inst).unwrap();
        assert!(matches!(w, CaseWitness::Case1 { .. } | CaseWitness::Case3a { .. }));
        let pure = crate::fixtures::tree(
            &[("r", 1, Some("X")), ("q", 0, None), ("y1", 1, Some("Y")), ("y2", 1, Some("Y")), ("x", 1, Some("X"))],
            &[("r", "x"), ("x", "q"), ("q", "y1"), ("q", "y2")],
        );
        // convex already
        assert_eq!(classify_case(&pure).unwrap(), CaseWitness::Cover);
    }

    #[test]
    fn case3a_reduction_deletes_subtree() {
        // Y only below q, and two Z leaves forcing a non-convex remainder
        let inst = crate::fixtures::tree(
            &[
                ("r", 0, None),
                ("z1", 1, Some("Z")),
                ("x", 1, Some("X")),
                ("z2", 1, Some("Z")),
                ("q", 0, None),
                ("y1", 1, Some("Y")),
                ("y2", 1, Some("Y")),
            ],
            &[("r", "z1"), ("r", "x"), ("x", "z2"), ("z2", "q"), ("q", "y1"), ("q", "y2")],
        );
        let w = classify_case(&inst).unwrap();
        let CaseWitness::Case1 { y, .. } = w else { panic!("expected case 1, got {w:?}") };
        assert_eq!(inst.id(y), "x");

        let three_a = crate::fixtures::tree(
            &[("r", 0, None), ("a", 1, Some("X")), ("b", 1, Some("X")), ("c", 1, Some("W")), ("q", 0, None), ("y1", 1, Some("Y")), ("y2", 1, Some("Y")), ("e", 1, Some("W"))],
            &[("r", "a"), ("r", "b"), ("r", "c"), ("c", "q"), ("q", "y1"), ("q", "y2"), ("r", "e")],
        );
        let w = classify_case(&three_a).unwrap();
        let CaseWitness::Case3a { root, d0, ref subtree } = w else { panic!("expected case 3a, got {w:?}") };
        assert_eq!(three_a.id(root), "q");
        assert_eq!(three_a.color_name(d0), "Y");
        assert_eq!(subtree.len(), 3);
        let (reduced, entry) = reduce(&three_a, w.clone()).unwrap();
        assert_eq!(reduced.len(), 5);
        assert!(reduced.ids().iter().all(|id| !["q", "y1", "y2"].contains(&id.as_str())));
        for v in reduced.vertices() {
            let old = entry.vertex_map.as_ref().unwrap()[v].unwrap();
            assert_eq!(reduced.weight(v), three_a.weight(old));
        }
    }

    #[test]
    fn four_tree_examples() {
        let rgr = string("RGR", &[1, 1, 1]);
        let out = four_tree_approx(&rgr).unwrap();
        assert_eq!(out.steps[0].vertices, [0, 1, 2]);
        assert_eq!(out.steps[0].epsilon, Weight(1));
        assert!(out.solution.cover_weight <= Weight(4));

        let convex = string("RRG", &[1, 1, 1]);
        assert_eq!(four_tree_approx(&convex).unwrap().solution.cover_weight, Weight(0));

        let star = six_leaf_star();
        let out = four_tree_approx(&star).unwrap();
        assert!(out.solution.cover_weight <= Weight(8));
        assert!(is_cover(&star, &out.solution.cover));
    }

    #[test]
    fn bicolored_examples() {
        let p = string("ABAB", &[3, 1, 1, 3]);
        let (col, cost) = bicolored_constrained_opt(&p, 0, 0).unwrap();
        assert_eq!(cost, Weight(1));
        assert_eq!(col.get(0), Some(0));
        // v1 itself must be overwritten (3), then the cheapest fix of the rest costs 1
        let (_, cost) = bicolored_constrained_opt(&p, 0, 1).unwrap();
        assert_eq!(cost, Weight(4));

        let mono = string("AAA", &[1, 2, 3]);
        assert_eq!(bicolored_constrained_opt(&mono, 1, 0).unwrap(), (Coloring::constant(3, 0), Weight(0)));

        assert!(matches!(bicolored_constrained_opt(&p, 9, 0), Err(Error::VertexOutOfRange(9))));
        assert!(matches!(bicolored_constrained_opt(&six_leaf_star(), 0, 0), Err(Error::TooManyColors)));
    }

    #[test]
    fn caterpillar_gadget() {
        let cat = caterpillar();
        let w = classify_case(&cat).unwrap();
        let g = compute_gadget(&cat, &w).unwrap();
        assert_eq!((g.c_high, g.c_medium, g.c_min), (Weight(1), Weight(1), Weight(0)));
        assert_eq!((g.root_weight(), g.leaf_weight()), (Weight(1), Weight(1)));
        assert_eq!(g.x_high, [5].into_iter().collect());
    }

    #[test]
    fn three_two_one_gadget() {
        let inst = gadget_three_two_one();
        let w = classify_case(&inst).unwrap();
        assert!(matches!(w, CaseWitness::Case3b { root: 2, .. }));
        let g = compute_gadget(&inst, &w).unwrap();
        assert_eq!((g.c_high, g.c_medium, g.c_min), (Weight(3), Weight(2), Weight(1)));
        assert_eq!((g.root_weight(), g.leaf_weight()), (Weight(1), Weight(2)));
    }

    #[test]
    fn gadget_rejects_other_cases() {
        let rgr = string("RGR", &[1, 1, 1]);
        let w = classify_case(&rgr).unwrap();
        assert!(matches!(compute_gadget(&rgr, &w), Err(Error::InvalidWitness(_))));
        // pure-d0 subtree is a case 3a boundary, not 3b
        let cat = caterpillar();
        let bogus = CaseWitness::Case3b { root: 2, d0: 1, d_prime: 0, parent: Some(1), subtree: vec![2, 3, 4] };
        assert!(compute_gadget(&cat, &bogus).is_err());
    }

    #[test]
    fn reduce_examples() {
        let rgr = string("RGR", &[1, 1, 1]);
        let (reduced, entry) = reduce(&rgr, classify_case(&rgr).unwrap()).unwrap();
        assert!(reduced.weights().iter().all(|w| w.is_zero()));
        assert_eq!(entry.zeroed, [0, 1, 2]);

        let cat = caterpillar();
        let (reduced, entry) = reduce(&cat, classify_case(&cat).unwrap()).unwrap();
        assert_eq!(reduced.ids(), ["r", "s", "a", "a#v0"]);
        assert_eq!(reduced.edges().collect::<Vec<_>>(), [(0, 1), (1, 2), (2, 3)]);
        assert_eq!(reduced.weights(), [Weight(1), Weight(0), Weight(1), Weight(1)]);
        assert_eq!(reduced.coloring().as_slice(), [Some(0), None, Some(1), Some(0)]);
        assert_eq!((entry.support_before, entry.support_after), (4, 3));
    }

    #[test]
    fn update_examples() {
        let cat = caterpillar();
        let (reduced, entry) = reduce(&cat, classify_case(&cat).unwrap()).unwrap();
        let x = update(&cat, &reduced, &entry, &[3].into_iter().collect()).unwrap();
        assert_eq!(x, [5].into_iter().collect());
        assert!(is_cover(&cat, &x));
        // a non-cover of the reduced instance is rejected
        assert!(matches!(update(&cat, &reduced, &entry, &Cover::empty()), Err(Error::NotACover)));

        let rgr = string("RGR", &[1, 1, 1]);
        let (reduced, entry) = reduce(&rgr, classify_case(&rgr).unwrap()).unwrap();
        assert_eq!(update(&rgr, &reduced, &entry, &[1].into_iter().collect()).unwrap(), [1].into_iter().collect());
    }

    #[test]
    fn update_with_weightless_gadget_uses_min() {
        // subtree already convex on its own once the outside X is gone
        let inst = crate::fixtures::tree(
            &[("s", 0, None), ("a", 0, None), ("b1", 1, Some("Y")), ("b2", 1, Some("Y")), ("c", 1, Some("X"))],
            &[("s", "a"), ("a", "b1"), ("a", "b2"), ("a", "c")],
        );
        let w = CaseWitness::Case3b { root: 1, d0: 0, d_prime: 1, parent: Some(0), subtree: vec![1, 2, 3, 4] };
        let g = compute_gadget(&inst, &w).unwrap();
        assert_eq!((g.c_high, g.c_medium, g.c_min), (Weight(1), Weight(1), Weight(0)));
        let (reduced, entry) = reduce(&inst, w).unwrap();
        let x = update(&inst, &reduced, &entry, &Cover::empty()).unwrap();
        assert_eq!(x, g.x_min);
    }

    #[test]
    fn three_tree_examples() {
        let star = six_leaf_star();
        let out = three_tree_approx(&star).unwrap();
        assert!(out.solution.cover_weight <= Weight(6));
        assert!(is_cover(&star, &out.solution.cover));
        assert!(is_convex(&star, &out.solution.coloring));

        let convex = string("RRG", &[1, 1, 1]);
        let out = three_tree_approx(&convex).unwrap();
        assert_eq!(out.solution.cover_weight, Weight(0));
        assert!(out.trace.rounds.is_empty());

        let cat = caterpillar();
        let out = three_tree_approx(&cat).unwrap();
        assert!(out.solution.cover_weight <= Weight(3));
        assert_eq!(out.trace.rounds[0].witness.tag(), "case3b");
    }
}
