//! Weighted, partially colored trees and strings.

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::coloring::Coloring;
use crate::weight::{self, Rational, Weight};

/// Dense vertex index, `0..n`.
pub type Vertex = usize;
/// Dense palette index, `0..c`, assigned in order of first appearance.
pub type ColorId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    /// Every vertex has degree at most two; dense ids follow the path order.
    String,
    Tree,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstanceError {
    #[error("instance has no vertices")]
    Empty,
    #[error("duplicate vertex id {0:?}")]
    DuplicateVertex(String),
    #[error("edge references unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("self loop on vertex {0:?}")]
    SelfLoop(String),
    #[error("duplicate edge {0:?} -- {1:?}")]
    DuplicateEdge(String, String),
    #[error("edges contain a cycle")]
    Cycle,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("vertex {vertex:?} has negative weight {weight}")]
    NegativeWeight { vertex: String, weight: String },
    #[error("instance declared as a string but vertex {0:?} has degree > 2")]
    NotAString(String),
    #[error("no vertex is colored, the palette is empty")]
    EmptyPalette,
    #[error("vertex {0:?}: coloring domain must equal the weight support")]
    SupportMismatch(String),
    #[error("weights overflow the exact integer representation")]
    WeightOverflow,
}

/// How [`validate`] treats the relation between the coloring domain and
/// `support(w) = { v : w(v) > 0 }`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SupportPolicy {
    /// Keep weights and colors exactly as given.
    #[default]
    AsIs,
    /// Uncolor zero-weight vertices and zero the weight of uncolored ones.
    Derive,
    /// Reject instances where the domain differs from the support.
    Enforce,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawVertex {
    pub id: String,
    pub weight: Rational,
    pub color: Option<String>,
}

/// Unchecked instance description, as read from a file.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawInstance {
    /// `None` lets validation detect the kind from the degrees.
    pub kind: Option<Kind>,
    pub vertices: Vec<RawVertex>,
    /// `None` for a string means "path in listed order".
    pub edges: Option<Vec<(String, String)>>,
}

impl RawInstance {
    /// Convenience constructor for a string in listed order.
    pub fn string<'a>(cells: impl IntoIterator<Item = (Option<&'a str>, i64)>) -> Self {
        let vertices = cells
            .into_iter()
            .enumerate()
            .map(|(i, (color, w))| RawVertex {
                id: format!("v{}", i + 1),
                weight: Rational::from_integer(w as i128),
                color: color.map(str::to_string),
            })
            .collect();
        RawInstance { kind: Some(Kind::String), vertices, edges: None }
    }
}

/// A validated weighted colored tree.
///
/// Immutable once built; the approximation algorithms derive new instances
/// instead of mutating.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    kind: Kind,
    // structure is shared between an instance and the variants derived from it
    ids: Arc<[String]>,
    palette: Arc<[String]>,
    adj: Arc<[Vec<Vertex>]>,
    weight: Vec<Weight>,
    color: Vec<Option<ColorId>>,
    scale: i128,
}

pub fn validate(raw: &RawInstance, policy: SupportPolicy) -> Result<Instance, InstanceError> {
    let n = raw.vertices.len();
    if n == 0 {
        return Err(InstanceError::Empty);
    }
    let mut index: HashMap<&str, usize> = HashMap::with_capacity(n);
    for (i, v) in raw.vertices.iter().enumerate() {
        if index.insert(v.id.as_str(), i).is_some() {
            return Err(InstanceError::DuplicateVertex(v.id.clone()));
        }
        if *v.weight.numer() < 0 {
            return Err(InstanceError::NegativeWeight {
                vertex: v.id.clone(),
                weight: weight::format_rational(&v.weight),
            });
        }
    }

    let edges: Vec<(usize, usize)> = match &raw.edges {
        Some(list) => {
            let mut seen = HashSet::with_capacity(list.len());
            let mut out = Vec::with_capacity(list.len());
            for (a, b) in list {
                let ia = *index.get(a.as_str()).ok_or_else(|| InstanceError::UnknownVertex(a.clone()))?;
                let ib = *index.get(b.as_str()).ok_or_else(|| InstanceError::UnknownVertex(b.clone()))?;
                if ia == ib {
                    return Err(InstanceError::SelfLoop(a.clone()));
                }
                if !seen.insert((ia.min(ib), ia.max(ib))) {
                    return Err(InstanceError::DuplicateEdge(a.clone(), b.clone()));
                }
                out.push((ia, ib));
            }
            out
        }
        None if raw.kind == Some(Kind::Tree) && n > 1 => return Err(InstanceError::Disconnected),
        None => (1..n).map(|i| (i - 1, i)).collect(),
    };

    let mut adj = vec![Vec::new(); n];
    for &(a, b) in &edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    check_tree(&adj, edges.len())?;

    let max_degree = adj.iter().map(Vec::len).max().unwrap_or(0);
    let kind = match raw.kind {
        Some(Kind::String) if max_degree > 2 => {
            let v = adj.iter().position(|a| a.len() > 2).unwrap();
            return Err(InstanceError::NotAString(raw.vertices[v].id.clone()));
        }
        Some(k) => k,
        None if max_degree <= 2 => Kind::String,
        None => Kind::Tree,
    };
    // Strings are renumbered along the path starting from the endpoint listed first.
    let order: Vec<usize> = if max_degree <= 2 {
        path_order(&adj)
    } else {
        (0..n).collect()
    };

    let scale = weight::common_denominator(raw.vertices.iter().map(|v| &v.weight))
        .ok_or(InstanceError::WeightOverflow)?;

    let mut palette: Vec<String> = Vec::new();
    let mut palette_index: HashMap<&str, ColorId> = HashMap::new();
    for &old in &order {
        if let Some(c) = &raw.vertices[old].color {
            palette_index.entry(c.as_str()).or_insert_with(|| {
                palette.push(c.clone());
                palette.len() - 1
            });
        }
    }
    if palette.is_empty() {
        return Err(InstanceError::EmptyPalette);
    }

    let mut new_of = vec![0; n];
    for (new, &old) in order.iter().enumerate() {
        new_of[old] = new;
    }
    let mut ids = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let mut colors = Vec::with_capacity(n);
    for &old in &order {
        let rv = &raw.vertices[old];
        let mut w = weight::scaled(&rv.weight, scale).ok_or(InstanceError::WeightOverflow)?;
        let mut c = rv.color.as_deref().map(|name| palette_index[name]);
        match policy {
            SupportPolicy::AsIs => {}
            SupportPolicy::Derive => {
                if w.is_zero() {
                    c = None;
                }
                if c.is_none() {
                    w = Weight::ZERO;
                }
            }
            SupportPolicy::Enforce => {
                if w.is_positive() != c.is_some() {
                    return Err(InstanceError::SupportMismatch(rv.id.clone()));
                }
            }
        }
        ids.push(rv.id.clone());
        weights.push(w);
        colors.push(c);
    }
    let mut new_adj = vec![Vec::new(); n];
    for (old, nbrs) in adj.iter().enumerate() {
        let mut list: Vec<usize> = nbrs.iter().map(|&u| new_of[u]).collect();
        list.sort_unstable();
        new_adj[new_of[old]] = list;
    }
    weights
        .iter()
        .try_fold(0i128, |acc, w| acc.checked_add(w.0))
        .ok_or(InstanceError::WeightOverflow)?;

    Ok(Instance { kind, ids: ids.into(), palette: palette.into(), adj: new_adj.into(), weight: weights, color: colors, scale })
}

fn check_tree(adj: &[Vec<usize>], edge_count: usize) -> Result<(), InstanceError> {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    let mut reached = 1;
    while let Some(v) = stack.pop() {
        for &u in &adj[v] {
            if !seen[u] {
                seen[u] = true;
                reached += 1;
                stack.push(u);
            }
        }
    }
    if edge_count >= n {
        return Err(InstanceError::Cycle);
    }
    if reached < n || edge_count + 1 < n {
        return Err(InstanceError::Disconnected);
    }
    Ok(())
}

fn path_order(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let start = (0..n).find(|&v| adj[v].len() <= 1).unwrap_or(0);
    let mut order = Vec::with_capacity(n);
    let mut prev = usize::MAX;
    let mut cur = start;
    loop {
        order.push(cur);
        match adj[cur].iter().find(|&&u| u != prev) {
            Some(&next) if order.len() < n => {
                prev = cur;
                cur = next;
            }
            _ => break,
        }
    }
    order
}

impl Instance {
    /// Builds an instance from already-consistent parts. The caller guarantees
    /// that `adj` is a tree, weights are nonnegative and colors index `palette`.
    pub(crate) fn from_parts(
        ids: Vec<String>,
        palette: Vec<String>,
        adj: Vec<Vec<Vertex>>,
        weight: Vec<Weight>,
        color: Vec<Option<ColorId>>,
        scale: i128,
    ) -> Instance {
        debug_assert_eq!(ids.len(), adj.len());
        debug_assert!(weight.iter().all(|w| w.0 >= 0));
        let is_path = adj.iter().all(|a| a.len() <= 2)
            && adj.iter().enumerate().all(|(v, a)| a.iter().all(|&u| u + 1 == v || v + 1 == u));
        let kind = if is_path { Kind::String } else { Kind::Tree };
        Instance { kind, ids: ids.into(), palette: palette.into(), adj: adj.into(), weight, color, scale }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn is_string(&self) -> bool {
        self.kind == Kind::String
    }

    pub fn vertices(&self) -> std::ops::Range<Vertex> {
        0..self.len()
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(v, nbrs)| nbrs.iter().filter(move |&&u| v < u).map(move |&u| (v, u)))
    }

    pub fn weight(&self, v: Vertex) -> Weight {
        self.weight[v]
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weight
    }

    pub fn color(&self, v: Vertex) -> Option<ColorId> {
        self.color[v]
    }

    /// The input coloring `C`.
    pub fn coloring(&self) -> Coloring {
        Coloring::new(self.color.clone())
    }

    pub fn colors(&self) -> &[Option<ColorId>] {
        &self.color
    }

    /// Palette size `c`.
    pub fn palette_len(&self) -> usize {
        self.palette.len()
    }

    pub fn palette(&self) -> &[String] {
        &self.palette
    }

    pub fn color_name(&self, d: ColorId) -> &str {
        &self.palette[d]
    }

    pub fn color_id(&self, name: &str) -> Option<ColorId> {
        self.palette.iter().position(|p| p == name)
    }

    pub fn id(&self, v: Vertex) -> &str {
        &self.ids[v]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn vertex(&self, id: &str) -> Option<Vertex> {
        self.ids.iter().position(|x| x == id)
    }

    /// Common denominator of all weights.
    pub fn scale(&self) -> i128 {
        self.scale
    }

    pub fn to_rational(&self, w: Weight) -> Rational {
        w.to_rational(self.scale)
    }

    pub fn total_weight(&self) -> Weight {
        self.weight.iter().sum()
    }

    pub fn weight_of<'a>(&self, set: impl IntoIterator<Item = &'a Vertex>) -> Weight {
        set.into_iter().map(|&v| self.weight[v]).sum()
    }

    /// `support(w)`, in increasing order.
    pub fn support(&self) -> Vec<Vertex> {
        self.vertices().filter(|&v| self.weight[v].is_positive()).collect()
    }

    /// Vertices outside `support(w)`.
    pub fn zero_weight(&self) -> Vec<Vertex> {
        self.vertices().filter(|&v| self.weight[v].is_zero()).collect()
    }

    /// Whether the coloring domain equals `support(w)`.
    pub fn domain_is_support(&self) -> bool {
        self.vertices().all(|v| self.weight[v].is_positive() == self.color[v].is_some())
    }

    /// Same tree and palette with the coloring domain forced to `support(w)`.
    ///
    /// Optimal costs are unchanged: zero-weight vertices are free to
    /// overwrite, and uncolored vertices never count toward a cost.
    pub fn support_normalized(&self) -> Instance {
        let mut out = self.clone();
        for v in out.vertices() {
            if out.weight[v].is_zero() {
                out.color[v] = None;
            }
            if out.color[v].is_none() {
                out.weight[v] = Weight::ZERO;
            }
        }
        out
    }

    /// Replaces the weights and restricts the coloring to the new support.
    pub fn with_weights(&self, weight: Vec<Weight>) -> Instance {
        assert_eq!(weight.len(), self.len());
        let color = self
            .color
            .iter()
            .zip(&weight)
            .map(|(&c, w)| if w.is_positive() { c } else { None })
            .collect();
        Instance { weight, color, ..self.clone() }
    }

    /// Same tree and coloring with different weights; the coloring domain is
    /// left alone, unlike [`Instance::with_weights`].
    pub fn reweighted(&self, weight: Vec<Weight>) -> Instance {
        assert_eq!(weight.len(), self.len());
        assert!(weight.iter().all(|w| w.0 >= 0), "weights must be nonnegative");
        Instance { weight, ..self.clone() }
    }

    /// Same tree and weights with a different coloring.
    pub fn with_coloring(&self, coloring: &Coloring) -> Instance {
        assert_eq!(coloring.len(), self.len());
        Instance { color: coloring.as_slice().to_vec(), ..self.clone() }
    }

    /// The sub-instance induced by a connected vertex set, with the map from
    /// new indices to old ones.
    pub fn induced(&self, keep: &[Vertex]) -> (Instance, Vec<Vertex>) {
        let mut new_of = vec![usize::MAX; self.len()];
        for (i, &v) in keep.iter().enumerate() {
            new_of[v] = i;
        }
        let adj = keep
            .iter()
            .map(|&v| {
                let mut l: Vec<usize> =
                    self.adj[v].iter().filter(|&&u| new_of[u] != usize::MAX).map(|&u| new_of[u]).collect();
                l.sort_unstable();
                l
            })
            .collect::<Vec<_>>();
        debug_assert_eq!(adj.iter().map(Vec::len).sum::<usize>() + 2, 2 * keep.len().max(1));
        let inst = Instance::from_parts(
            keep.iter().map(|&v| self.ids[v].clone()).collect(),
            self.palette.to_vec(),
            adj,
            keep.iter().map(|&v| self.weight[v]).collect(),
            keep.iter().map(|&v| self.color[v]).collect(),
            self.scale,
        );
        (inst, keep.to_vec())
    }

    /// Back to an unchecked description (ids, rationals and color names).
    pub fn to_raw(&self) -> RawInstance {
        RawInstance {
            kind: Some(self.kind),
            vertices: self
                .vertices()
                .map(|v| RawVertex {
                    id: self.ids[v].clone(),
                    weight: self.to_rational(self.weight[v]),
                    color: self.color[v].map(|d| self.palette[d].clone()),
                })
                .collect(),
            edges: Some(self.edges().map(|(a, b)| (self.ids[a].clone(), self.ids[b].clone())).collect()),
        }
    }
}

/// A BFS rooting of an instance's tree.
#[derive(Debug, Clone)]
pub struct Rooted {
    pub root: Vertex,
    pub parent: Vec<Option<Vertex>>,
    pub depth: Vec<usize>,
    /// BFS order from the root; parents precede children.
    pub order: Vec<Vertex>,
}

impl Rooted {
    pub fn new(inst: &Instance, root: Vertex) -> Rooted {
        let n = inst.len();
        let mut parent = vec![None; n];
        let mut depth = vec![0; n];
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &u in inst.neighbors(v) {
                if !seen[u] {
                    seen[u] = true;
                    parent[u] = Some(v);
                    depth[u] = depth[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        Rooted { root, parent, depth, order }
    }

    pub fn children<'a>(&'a self, inst: &'a Instance, v: Vertex) -> impl Iterator<Item = Vertex> + 'a {
        inst.neighbors(v).iter().copied().filter(move |&u| self.parent[u] == Some(v))
    }

    /// Vertices of the subtree rooted at `v`, in BFS order.
    pub fn subtree(&self, inst: &Instance, v: Vertex) -> Vec<Vertex> {
        let mut out = vec![v];
        let mut i = 0;
        while i < out.len() {
            let x = out[i];
            out.extend(self.children(inst, x));
            i += 1;
        }
        out
    }
}
