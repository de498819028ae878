//! Brute-force optimum, seeded instance generators and ratio measurement.
//!
//! All randomness comes from a PCG-64 generator (`Pcg64`, XSL-RR 128/64)
//! seeded with `seed_from_u64`. Bounded draws are `next_u64() % bound`; the
//! modulo bias is negligible at these sizes and keeps ports bit-identical.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand_core::{Rng, SeedableRng};
use rand_pcg::Pcg64;

use crate::coloring::Cover;
use crate::convexity::is_cover;
use crate::error::{Error, Result};
use crate::instance::{validate, Instance, Kind, RawInstance, RawVertex, SupportPolicy};
use crate::solution::{LocalRatioStep, Solution};
use crate::string_approx::{three_string_approx, two_approx_string};
use crate::tree_approx::{classify_case, four_tree_approx, three_tree_approx, CaseWitness, ReductionTrace};
use crate::weight::{Rational, Weight};

pub const DEFAULT_CAP: usize = 16;

fn check_cap(inst: &Instance, cap: usize) -> Result<()> {
    if inst.len() > cap {
        return Err(Error::CapExceeded { n: inst.len(), cap });
    }
    Ok(())
}

/// Calls `visit` with every subset of the colored vertices whose weight is at
/// most the running bound returned by the previous call.
fn enumerate_covers(inst: &Instance, mut visit: impl FnMut(Weight, Cover) -> Weight) {
    // uncolored vertices never affect convexity, so only colored ones are tried
    let colored: Vec<usize> = inst.vertices().filter(|&v| inst.color(v).is_some()).collect();
    let weights: Vec<Weight> = colored.iter().map(|&v| inst.weight(v)).collect();
    let mut bound = inst.total_weight();
    for mask in 0u32..(1u32 << colored.len()) {
        let w: Weight = (0..colored.len()).filter(|&i| mask >> i & 1 == 1).map(|i| weights[i]).sum();
        if w > bound {
            continue;
        }
        let cover: Cover = (0..colored.len()).filter(|&i| mask >> i & 1 == 1).map(|i| colored[i]).collect();
        if is_cover(inst, &cover) {
            bound = visit(w, cover);
        }
    }
}

/// Minimum-weight cover, ties going to the lexicographically smallest member list.
pub fn exact_opt(inst: &Instance) -> Result<(Cover, Weight)> {
    exact_opt_capped(inst, DEFAULT_CAP)
}

pub fn exact_opt_capped(inst: &Instance, cap: usize) -> Result<(Cover, Weight)> {
    check_cap(inst, cap)?;
    let mut best: Option<(Weight, Cover)> = None;
    enumerate_covers(inst, |w, cover| {
        let better = match &best {
            None => true,
            Some((bw, bc)) => w < *bw || (w == *bw && cover.members() < bc.members()),
        };
        if better {
            best = Some((w, cover));
        }
        best.as_ref().unwrap().0
    });
    // the full colored set is always a cover
    let (w, cover) = best.expect("some cover exists");
    Ok((cover, w))
}

/// Every minimum-weight cover among subsets of the colored vertices, sorted.
pub fn enumerate_optima(inst: &Instance) -> Result<Vec<Cover>> {
    enumerate_optima_capped(inst, DEFAULT_CAP)
}

pub fn enumerate_optima_capped(inst: &Instance, cap: usize) -> Result<Vec<Cover>> {
    check_cap(inst, cap)?;
    let mut best = Weight(i128::MAX);
    let mut all: Vec<Cover> = Vec::new();
    enumerate_covers(inst, |w, cover| {
        if w < best {
            best = w;
            all.clear();
        }
        all.push(cover);
        best
    });
    all.sort_by(|a, b| a.members().cmp(b.members()));
    Ok(all)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    RandomTree,
    Path,
    Star,
    Caterpillar,
    Case2Spider,
    Case3bFamily,
}

impl Shape {
    pub const ALL: [Shape; 6] =
        [Shape::RandomTree, Shape::Path, Shape::Star, Shape::Caterpillar, Shape::Case2Spider, Shape::Case3bFamily];

    pub fn name(self) -> &'static str {
        match self {
            Shape::RandomTree => "random-tree",
            Shape::Path => "path",
            Shape::Star => "star",
            Shape::Caterpillar => "caterpillar",
            Shape::Case2Spider => "case2-spider",
            Shape::Case3bFamily => "case3b-family",
        }
    }

    /// Smallest `(n, c)` the shape can be built with.
    pub fn minimum(self) -> (usize, usize) {
        match self {
            Shape::Case2Spider => (7, 3),
            Shape::Case3bFamily => (6, 2),
            _ => (1, 1),
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Shape> {
        Shape::ALL
            .into_iter()
            .find(|sh| sh.name() == s)
            .ok_or_else(|| Error::Generator(format!("unknown shape {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenParams {
    pub n: usize,
    pub c: usize,
    pub weight_max: u32,
    pub shape: Shape,
    /// Chance that a vertex gets weight 0 (and no color). Ignored by the
    /// spider and case 3b families.
    pub zero_weight_fraction: Rational,
    pub seed: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            n: 8,
            c: 3,
            weight_max: 8,
            shape: Shape::RandomTree,
            zero_weight_fraction: Rational::from_integer(0),
            seed: 0,
        }
    }
}

struct Draw(Pcg64);

impl Draw {
    fn new(seed: u64) -> Draw {
        Draw(Pcg64::seed_from_u64(seed))
    }

    /// Uniform-ish in `0..bound`.
    fn below(&mut self, bound: usize) -> usize {
        (self.0.next_u64() % bound as u64) as usize
    }

    fn weight(&mut self, max: u32) -> i64 {
        1 + self.below(max as usize) as i64
    }

    fn chance(&mut self, p: &Rational) -> bool {
        *p.numer() > 0 && (self.below(*p.denom() as usize) as i128) < *p.numer()
    }
}

fn color_name(k: usize) -> String {
    format!("c{}", k + 1)
}

/// Decodes a uniformly random Prüfer sequence.
fn random_tree_edges(draw: &mut Draw, n: usize) -> Vec<(usize, usize)> {
    match n {
        0 | 1 => return Vec::new(),
        2 => return vec![(0, 1)],
        _ => {}
    }
    let seq: Vec<usize> = (0..n - 2).map(|_| draw.below(n)).collect();
    let mut degree = vec![1usize; n];
    for &x in &seq {
        degree[x] += 1;
    }
    let mut leaves: BTreeSet<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &x in &seq {
        let leaf = leaves.pop_first().unwrap();
        edges.push((leaf, x));
        degree[x] -= 1;
        if degree[x] == 1 {
            leaves.insert(x);
        }
    }
    let rest: Vec<usize> = leaves.into_iter().collect();
    edges.push((rest[0], rest[1]));
    edges
}

struct Draft {
    kind: Option<Kind>,
    cells: Vec<(i64, Option<usize>)>,
    edges: Vec<(usize, usize)>,
}

impl Draft {
    fn build(self) -> Result<Instance> {
        let raw = RawInstance {
            kind: self.kind,
            vertices: self
                .cells
                .iter()
                .enumerate()
                .map(|(i, &(w, c))| RawVertex {
                    id: format!("v{}", i + 1),
                    weight: Rational::from_integer(w as i128),
                    color: c.map(color_name),
                })
                .collect(),
            edges: Some(self.edges.iter().map(|&(a, b)| (format!("v{}", a + 1), format!("v{}", b + 1))).collect()),
        };
        Ok(validate(&raw, SupportPolicy::AsIs)?)
    }
}

fn random_cells(draw: &mut Draw, p: &GenParams) -> Vec<(i64, Option<usize>)> {
    let mut cells: Vec<(i64, Option<usize>)> = (0..p.n)
        .map(|_| {
            if draw.chance(&p.zero_weight_fraction) {
                (0, None)
            } else {
                let w = draw.weight(p.weight_max);
                (w, Some(draw.below(p.c)))
            }
        })
        .collect();
    if cells.iter().all(|c| c.1.is_none()) {
        cells[0] = (1, Some(0));
    }
    cells
}

fn spider(draw: &mut Draw, p: &GenParams) -> Draft {
    let pairs = p.c.min((p.n - 1) / 2);
    let legs = 2 * pairs;
    let mut length = vec![1usize; legs];
    for _ in legs..p.n - 1 {
        length[draw.below(legs)] += 1;
    }
    let mut cells = vec![(0, None)];
    let mut edges = Vec::new();
    for (leg, &len) in length.iter().enumerate() {
        let mut prev = 0;
        for _ in 0..len {
            let v = cells.len();
            cells.push((draw.weight(p.weight_max), Some(leg / 2)));
            edges.push((prev, v));
            prev = v;
        }
    }
    Draft { kind: Some(Kind::Tree), cells, edges }
}

/// Vertex 0 colored `d'` plus other colors in `T-hat`, a zero-weight `s`
/// hanging from it, and a zero-weight junction `a` below `s` rooting a small
/// subtree colored only with `d0` and `d'`.
fn case3b_draft(draw: &mut Draw, p: &GenParams) -> Draft {
    let (d_prime, d0) = (0, 1);
    let tbar = 8.min(p.n - 2);
    let rest = p.n - 1 - tbar;
    let mut cells = Vec::with_capacity(p.n);
    let mut edges = Vec::with_capacity(p.n - 1);
    cells.push((draw.weight(p.weight_max), Some(d_prime)));
    for v in 1..rest {
        let mut d = draw.below(p.c - 1);
        if d >= d0 {
            d += 1;
        }
        cells.push((draw.weight(p.weight_max), Some(d)));
        edges.push((draw.below(v), v));
    }
    let s = rest;
    cells.push((0, None));
    edges.push((draw.below(rest), s));
    let a = s + 1;
    cells.push((0, None));
    edges.push((s, a));
    for j in 1..tbar {
        let v = a + j;
        let d = if draw.below(2) == 0 { d0 } else { d_prime };
        cells.push((draw.weight(p.weight_max), Some(d)));
        edges.push((a + draw.below(j), v));
    }
    Draft { kind: Some(Kind::Tree), cells, edges }
}

const CASE3B_ATTEMPTS: usize = 4096;

/// A reproducible instance of the requested shape.
pub fn gen_instance(p: &GenParams) -> Result<Instance> {
    let (min_n, min_c) = p.shape.minimum();
    if p.n < min_n.max(1) || p.c < min_c.max(1) {
        return Err(Error::Generator(format!("{} needs n >= {min_n} and c >= {min_c}", p.shape)));
    }
    if p.weight_max == 0 {
        return Err(Error::Generator("weight_max must be positive".into()));
    }
    let f = &p.zero_weight_fraction;
    if *f.numer() < 0 || f.numer() > f.denom() {
        return Err(Error::Generator("zero_weight_fraction must lie in [0, 1]".into()));
    }
    let mut draw = Draw::new(p.seed);
    let n = p.n;
    let draft = match p.shape {
        Shape::Path => Draft { kind: Some(Kind::String), cells: random_cells(&mut draw, p), edges: (1..n).map(|i| (i - 1, i)).collect() },
        Shape::Star => Draft { kind: None, cells: random_cells(&mut draw, p), edges: (1..n).map(|i| (0, i)).collect() },
        Shape::RandomTree => {
            let edges = random_tree_edges(&mut draw, n);
            Draft { kind: None, cells: random_cells(&mut draw, p), edges }
        }
        Shape::Caterpillar => {
            let spine = n.div_ceil(2);
            let mut edges: Vec<(usize, usize)> = (1..spine).map(|i| (i - 1, i)).collect();
            edges.extend((spine..n).map(|v| (draw.below(spine), v)));
            Draft { kind: None, cells: random_cells(&mut draw, p), edges }
        }
        Shape::Case2Spider => spider(&mut draw, p),
        Shape::Case3bFamily => {
            for _ in 0..CASE3B_ATTEMPTS {
                let inst = case3b_draft(&mut draw, p).build()?;
                if matches!(classify_case(&inst)?, CaseWitness::Case3b { .. }) {
                    return Ok(inst);
                }
            }
            return Err(Error::Generator(format!("no case 3b configuration found for n = {n}, c = {}", p.c)));
        }
    };
    draft.build()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    String2,
    String3,
    Tree3,
    Tree4,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::String2, Algorithm::String3, Algorithm::Tree3, Algorithm::Tree4];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::String2 => "string2",
            Algorithm::String3 => "string3",
            Algorithm::Tree3 => "tree3",
            Algorithm::Tree4 => "tree4",
        }
    }

    /// Proven approximation factor.
    pub fn bound(self) -> u32 {
        match self {
            Algorithm::String2 => 2,
            Algorithm::String3 | Algorithm::Tree3 => 3,
            Algorithm::Tree4 => 4,
        }
    }

    pub fn needs_string(self) -> bool {
        matches!(self, Algorithm::String2 | Algorithm::String3)
    }

    pub fn run(self, inst: &Instance) -> Result<AlgoRun> {
        Ok(match self {
            Algorithm::String2 => {
                let out = two_approx_string(inst)?;
                let solution = Solution { cover: out.cover, cover_weight: out.cost, coloring: out.coloring, cost: out.cost };
                AlgoRun { solution, steps: Vec::new(), trace: None }
            }
            Algorithm::String3 => {
                let out = three_string_approx(inst)?;
                AlgoRun { solution: out.solution, steps: out.steps, trace: None }
            }
            Algorithm::Tree4 => {
                let out = four_tree_approx(inst)?;
                AlgoRun { solution: out.solution, steps: out.steps, trace: None }
            }
            Algorithm::Tree3 => {
                let out = three_tree_approx(inst)?;
                AlgoRun { solution: out.solution, steps: Vec::new(), trace: Some(out.trace) }
            }
        })
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Algorithm> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Generator(format!("unknown algorithm {s:?}")))
    }
}

/// Output of [`Algorithm::run`]. `solution.cover_weight` is the bounded quantity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgoRun {
    pub solution: Solution,
    pub steps: Vec<LocalRatioStep>,
    pub trace: Option<ReductionTrace>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioEntry {
    pub index: usize,
    pub seed: u64,
    pub n: usize,
    pub c: usize,
    pub cost: Rational,
    pub opt: Rational,
    /// `cost / opt`; `None` when `opt = 0 < cost`.
    pub ratio: Option<Rational>,
    pub within_bound: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioReport {
    pub algorithm: Algorithm,
    pub bound: u32,
    pub entries: Vec<RatioEntry>,
    pub max_ratio: Option<Rational>,
    pub mean_ratio: f64,
    pub violations: usize,
    /// First instance that broke the bound.
    pub offender: Option<Instance>,
}

impl RatioReport {
    /// Turns a violation into an error carrying the offending instance.
    pub fn ensure_within_bound(&self) -> Result<()> {
        let Some(inst) = &self.offender else { return Ok(()) };
        let entry = self.entries.iter().find(|e| !e.within_bound).expect("offender has an entry");
        Err(Error::BoundExceeded {
            algorithm: self.algorithm.name().to_string(),
            bound: self.bound,
            cost: crate::weight::format_rational(&entry.cost),
            opt: crate::weight::format_rational(&entry.opt),
            instance: crate::io::instance_to_json(inst),
        })
    }
}

/// Runs `algo` and the oracle on `count` generated instances.
///
/// Instance `i` uses seed `params.seed + i`, from which its size is drawn
/// uniformly in `[min_n, params.n]` and its palette in `[min_c, params.c]`.
pub fn measure_ratio(algo: Algorithm, params: &GenParams, count: usize) -> Result<RatioReport> {
    if algo.needs_string() && params.shape != Shape::Path {
        return Err(Error::Generator(format!("{algo} runs on strings; use the path shape")));
    }
    let (min_n, min_c) = params.shape.minimum();
    if params.n < min_n || params.c < min_c {
        return Err(Error::Generator(format!("{} needs n >= {min_n} and c >= {min_c}", params.shape)));
    }
    let mut entries = Vec::with_capacity(count);
    let mut offender = None;
    let mut max_ratio: Option<Rational> = Some(Rational::from_integer(0));
    let mut sum = 0.0;
    for index in 0..count {
        let seed = params.seed.wrapping_add(index as u64);
        let mut draw = Draw::new(seed);
        let n = min_n + draw.below(params.n - min_n + 1);
        let c = min_c + draw.below(params.c - min_c + 1);
        let inst = gen_instance(&GenParams { n, c, seed, ..params.clone() })?;
        let run = algo.run(&inst)?;
        let (_, opt) = exact_opt(&inst)?;
        let cost = run.solution.cover_weight;
        let within_bound = cost <= opt * algo.bound() as i128;
        let ratio = if opt.is_zero() {
            cost.is_zero().then(|| Rational::from_integer(1))
        } else {
            Some(Rational::new(cost.0, opt.0))
        };
        max_ratio = match (max_ratio, ratio) {
            (Some(m), Some(r)) => Some(m.max(r)),
            _ => None,
        };
        sum += ratio.map_or(f64::INFINITY, |r| *r.numer() as f64 / *r.denom() as f64);
        if !within_bound && offender.is_none() {
            offender = Some(inst.clone());
        }
        entries.push(RatioEntry {
            index,
            seed,
            n,
            c,
            cost: inst.to_rational(cost),
            opt: inst.to_rational(opt),
            ratio,
            within_bound,
        });
    }
    let violations = entries.iter().filter(|e| !e.within_bound).count();
    let mean_ratio = if count == 0 { 0.0 } else { sum / count as f64 };
    Ok(RatioReport { algorithm: algo, bound: algo.bound(), entries, max_ratio, mean_ratio, violations, offender })
}
