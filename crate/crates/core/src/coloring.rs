use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::instance::{ColorId, Instance, Vertex};
use crate::weight::Weight;

/// A partial or total assignment of colors to vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Coloring(Vec<Option<ColorId>>);

impl Coloring {
    pub fn new(colors: Vec<Option<ColorId>>) -> Coloring {
        Coloring(colors)
    }

    pub fn total(colors: Vec<ColorId>) -> Coloring {
        Coloring(colors.into_iter().map(Some).collect())
    }

    pub fn constant(n: usize, d: ColorId) -> Coloring {
        Coloring(vec![Some(d); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, v: Vertex) -> Option<ColorId> {
        self.0[v]
    }

    pub fn set(&mut self, v: Vertex, d: Option<ColorId>) {
        self.0[v] = d;
    }

    pub fn as_slice(&self) -> &[Option<ColorId>] {
        &self.0
    }

    pub fn is_total(&self) -> bool {
        self.0.iter().all(Option::is_some)
    }

    /// Number of colored vertices.
    pub fn domain_len(&self) -> usize {
        self.0.iter().filter(|c| c.is_some()).count()
    }

    pub fn domain(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.0.iter().enumerate().filter_map(|(v, c)| c.map(|_| v))
    }

    /// Colors actually used, ascending.
    pub fn used_colors(&self) -> Vec<ColorId> {
        let set: BTreeSet<ColorId> = self.0.iter().flatten().copied().collect();
        set.into_iter().collect()
    }

    /// Vertices of color `d`, ascending.
    pub fn class(&self, d: ColorId) -> Vec<Vertex> {
        self.0.iter().enumerate().filter(|(_, c)| **c == Some(d)).map(|(v, _)| v).collect()
    }

    /// The restriction to `V \ cover`.
    pub fn without(&self, cover: &Cover) -> Coloring {
        let mut out = self.clone();
        for &v in cover.members() {
            out.0[v] = None;
        }
        out
    }
}

/// A vertex set whose removal from the coloring domain is meant to leave a
/// convex partial coloring. Members are kept sorted and unique.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cover(Vec<Vertex>);

impl Cover {
    pub fn empty() -> Cover {
        Cover(Vec::new())
    }

    pub fn members(&self) -> &[Vertex] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn insert(&mut self, v: Vertex) {
        if let Err(pos) = self.0.binary_search(&v) {
            self.0.insert(pos, v);
        }
    }

    pub fn remove(&mut self, v: Vertex) {
        if let Ok(pos) = self.0.binary_search(&v) {
            self.0.remove(pos);
        }
    }

    pub fn union(&self, other: &Cover) -> Cover {
        self.0.iter().chain(&other.0).copied().collect()
    }

    pub fn weight(&self, inst: &Instance) -> Weight {
        inst.weight_of(&self.0)
    }

    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &v in &self.0 {
            m[v] = true;
        }
        m
    }
}

impl Cover {
    pub(crate) fn from_sorted(members: Vec<Vertex>) -> Cover {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        Cover(members)
    }
}

impl FromIterator<Vertex> for Cover {
    fn from_iter<I: IntoIterator<Item = Vertex>>(iter: I) -> Cover {
        let mut v: Vec<Vertex> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Cover(v)
    }
}
