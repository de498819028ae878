//! Instance files, result documents and report serialization.
//!
//! Weights and costs travel as exact rational strings (`"3"`, `"7/2"`).
//! Instances are JSON documents or, for strings, a TSV shorthand with one
//! `color<TAB>weight` line per vertex (`.` or `-` for uncolored).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::coloring::{Coloring, Cover};
use crate::convexity::{complete_to_convex, is_cover, overwritten, recoloring_cost};
use crate::instance::{validate, Instance, InstanceError, Kind, RawInstance, RawVertex, SupportPolicy, Vertex};
use crate::oracle::RatioReport;
use crate::penalty::PenaltyReport;
use crate::tree_approx::{CaseWitness, ReductionTrace};
use crate::weight::{format_rational, parse_rational, Rational, Weight};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("line {line}: {message}")]
    Tsv { line: usize, message: String },
    #[error("vertex {vertex:?}: bad weight {text:?}: {message}")]
    Weight { vertex: String, text: String, message: String },
    #[error("{0}")]
    Instance(#[from] InstanceError),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("cover lists vertex {0:?} twice")]
    DuplicateVertex(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexRecord {
    pub id: String,
    pub weight: String,
    #[serde(default)]
    pub color: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<Kind>,
    pub vertices: Vec<VertexRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<(String, String)>>,
}

impl InstanceFile {
    pub fn to_raw(&self) -> Result<RawInstance, IoError> {
        let vertices = self
            .vertices
            .iter()
            .map(|v| {
                let weight = parse_rational(&v.weight).map_err(|e| IoError::Weight {
                    vertex: v.id.clone(),
                    text: v.weight.clone(),
                    message: e.to_string(),
                })?;
                Ok(RawVertex { id: v.id.clone(), weight, color: v.color.clone() })
            })
            .collect::<Result<_, IoError>>()?;
        Ok(RawInstance { kind: self.kind, vertices, edges: self.edges.clone() })
    }

    pub fn from_instance(inst: &Instance) -> InstanceFile {
        let raw = inst.to_raw();
        InstanceFile {
            kind: raw.kind,
            vertices: raw
                .vertices
                .into_iter()
                .map(|v| VertexRecord { id: v.id, weight: format_rational(&v.weight), color: v.color })
                .collect(),
            // strings are listed in path order, so their edges are implied
            edges: if inst.is_string() { None } else { raw.edges },
        }
    }
}

fn parse_tsv(text: &str) -> Result<RawInstance, IoError> {
    let mut cells = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [color, weight] = fields[..] else {
            return Err(IoError::Tsv { line: i + 1, message: format!("expected `color<TAB>weight`, got {line:?}") });
        };
        let weight = parse_rational(weight).map_err(|e| IoError::Tsv { line: i + 1, message: e.to_string() })?;
        let color = (!matches!(color, "." | "-")).then(|| color.to_string());
        cells.push(RawVertex { id: format!("v{}", cells.len() + 1), weight, color });
    }
    Ok(RawInstance { kind: Some(Kind::String), vertices: cells, edges: None })
}

/// Parses a JSON instance document, or the TSV string shorthand when the
/// text does not start with `{`.
pub fn parse_instance(text: &str) -> Result<Instance, IoError> {
    let raw = if text.trim_start().starts_with('{') {
        serde_json::from_str::<InstanceFile>(text)?.to_raw()?
    } else {
        parse_tsv(text)?
    };
    Ok(validate(&raw, SupportPolicy::AsIs)?)
}

pub fn instance_to_json(inst: &Instance) -> String {
    serde_json::to_string(&InstanceFile::from_instance(inst)).expect("instance serializes")
}

pub fn instance_to_json_pretty(inst: &Instance) -> String {
    serde_json::to_string_pretty(&InstanceFile::from_instance(inst)).expect("instance serializes")
}

pub fn instance_to_tsv(inst: &Instance) -> Option<String> {
    if !inst.is_string() {
        return None;
    }
    let mut out = String::new();
    for v in inst.vertices() {
        let color = inst.color(v).map_or(".", |d| inst.color_name(d));
        out.push_str(&format!("{color}\t{}\n", format_rational(&inst.to_rational(inst.weight(v)))));
    }
    Some(out)
}

fn rat(inst: &Instance, w: Weight) -> String {
    format_rational(&inst.to_rational(w))
}

fn ids(inst: &Instance, vs: impl IntoIterator<Item = Vertex>) -> Vec<String> {
    vs.into_iter().map(|v| inst.id(v).to_string()).collect()
}

/// Parses a cover given as a JSON id array, a result document with a
/// `cover` field, or whitespace/comma separated ids.
pub fn parse_cover(text: &str, inst: &Instance) -> Result<Cover, IoError> {
    let trimmed = text.trim();
    let names: Vec<String> = if trimmed.starts_with('[') {
        serde_json::from_str(trimmed)?
    } else if trimmed.starts_with('{') {
        #[derive(Deserialize)]
        struct WithCover {
            cover: Vec<String>,
        }
        serde_json::from_str::<WithCover>(trimmed)?.cover
    } else {
        trimmed
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect()
    };
    let mut cover = Cover::empty();
    for name in names {
        let v = inst.vertex(&name).ok_or_else(|| IoError::UnknownVertex(name.clone()))?;
        if cover.contains(v) {
            return Err(IoError::DuplicateVertex(name));
        }
        cover.insert(v);
    }
    Ok(cover)
}

/// The document an `approx` or `exact` run prints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    pub algorithm: String,
    /// Recoloring cost of `coloring`, equal to the weight of `cover`.
    pub cost: String,
    /// Overwritten set of `coloring`.
    pub cover: Vec<String>,
    pub coloring: BTreeMap<String, String>,
    pub lower_bound: String,
    pub opt: Option<String>,
    /// The cover the algorithm itself returned and its weight.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algorithm_cover: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algorithm_cover_weight: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Value>,
}

impl ResultFile {
    pub fn new(
        algorithm: &str,
        inst: &Instance,
        coloring: &Coloring,
        lower_bound: Rational,
        opt: Option<Weight>,
    ) -> ResultFile {
        let cover = overwritten(inst, coloring);
        ResultFile {
            algorithm: algorithm.to_string(),
            cost: rat(inst, recoloring_cost(inst, coloring)),
            cover: ids(inst, cover.members().iter().copied()),
            coloring: inst
                .vertices()
                .filter_map(|v| coloring.get(v).map(|d| (inst.id(v).to_string(), inst.color_name(d).to_string())))
                .collect(),
            lower_bound: format_rational(&lower_bound),
            opt: opt.map(|w| rat(inst, w)),
            algorithm_cover: None,
            algorithm_cover_weight: None,
            trace: None,
        }
    }

    pub fn with_algorithm_cover(mut self, inst: &Instance, cover: &Cover) -> ResultFile {
        self.algorithm_cover = Some(ids(inst, cover.members().iter().copied()));
        self.algorithm_cover_weight = Some(rat(inst, cover.weight(inst)));
        self
    }
}

/// Outcome of checking a vertex set against an instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub valid: bool,
    /// Weight of the checked set.
    pub cost: String,
    /// Convex completion of the coloring outside the set, when it is a cover.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coloring: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub completion_cost: Option<String>,
}

pub fn verify_cover(inst: &Instance, cover: &Cover) -> VerifyReport {
    let valid = is_cover(inst, cover);
    let completion = valid.then(|| complete_to_convex(inst, &inst.coloring().without(cover)).expect("cover is convex"));
    VerifyReport {
        valid,
        cost: rat(inst, cover.weight(inst)),
        coloring: completion.as_ref().map(|col| {
            inst.vertices()
                .filter_map(|v| col.get(v).map(|d| (inst.id(v).to_string(), inst.color_name(d).to_string())))
                .collect()
        }),
        completion_cost: completion.as_ref().map(|col| rat(inst, recoloring_cost(inst, col))),
    }
}

pub fn penalty_report_json(inst: &Instance, report: &PenaltyReport) -> Value {
    json!({
        "lower_bound": format_rational(&report.lower_bound),
        "sum_p_star": rat(inst, report.sum_p_star),
        "per_color": report.per_color.iter().map(|b| json!({
            "color": inst.color_name(b.color),
            "block": ids(inst, b.block.iter().copied()),
            "p_star": rat(inst, b.p_star),
        })).collect::<Vec<_>>(),
    })
}

fn witness_json(inst: &Instance, w: &CaseWitness) -> Value {
    let id = |v: Vertex| inst.id(v).to_string();
    match w {
        CaseWitness::Cover => json!({ "case": "cover" }),
        &CaseWitness::Case1 { x, y, z } => json!({ "case": "case1", "x": id(x), "y": id(y), "z": id(z) }),
        CaseWitness::Case2 { center, colors, pairs } => json!({
            "case": "case2",
            "center": id(*center),
            "colors": colors.iter().map(|&d| inst.color_name(d)).collect::<Vec<_>>(),
            "pairs": pairs.iter().map(|&(a, b)| [id(a), id(b)]).collect::<Vec<_>>(),
        }),
        CaseWitness::Case3a { root, d0, subtree } => json!({
            "case": "case3a",
            "root": id(*root),
            "d0": inst.color_name(*d0),
            "subtree": ids(inst, subtree.iter().copied()),
        }),
        CaseWitness::Case3b { root, d0, d_prime, parent, subtree } => json!({
            "case": "case3b",
            "root": id(*root),
            "d0": inst.color_name(*d0),
            "d_prime": inst.color_name(*d_prime),
            "parent": parent.map(id),
            "subtree": ids(inst, subtree.iter().copied()),
        }),
    }
}

/// One object per round, with vertices named by their ids in that round's instance.
pub fn trace_json(trace: &ReductionTrace) -> Value {
    let rounds: Vec<Value> = trace
        .rounds
        .iter()
        .enumerate()
        .map(|(k, entry)| {
            let inst = &trace.instances[k];
            let reduced = &trace.instances[k + 1];
            let mut obj = json!({
                "round": k,
                "n": inst.len(),
                "witness": witness_json(inst, &entry.witness),
                "support_before": entry.support_before,
                "support_after": entry.support_after,
            });
            if let Some(eps) = entry.epsilon {
                obj["epsilon"] = json!(rat(inst, eps));
                obj["discounted"] = json!(ids(inst, entry.discounted.iter().copied()));
                obj["zeroed"] = json!(ids(inst, entry.zeroed.iter().copied()));
            }
            if let Some(g) = &entry.gadget {
                obj["gadget"] = json!({
                    "c_high": rat(inst, g.c_high),
                    "c_medium": rat(inst, g.c_medium),
                    "c_min": rat(inst, g.c_min),
                    "x_high": ids(inst, g.x_high.members().iter().copied()),
                    "x_medium": ids(inst, g.x_medium.members().iter().copied()),
                    "x_min": ids(inst, g.x_min.members().iter().copied()),
                    "root": reduced.id(g.gadget_root),
                    "root_weight": rat(inst, g.root_weight()),
                    "leaf": reduced.id(g.gadget_leaf),
                    "leaf_weight": rat(inst, g.leaf_weight()),
                });
            }
            obj
        })
        .collect();
    json!({ "rounds": rounds, "base": instance_to_value(trace.instances.last().unwrap()) })
}

fn instance_to_value(inst: &Instance) -> Value {
    serde_json::to_value(InstanceFile::from_instance(inst)).expect("instance serializes")
}

#[derive(Serialize)]
struct RatioRow<'a> {
    index: usize,
    seed: u64,
    n: usize,
    c: usize,
    cost: String,
    opt: String,
    ratio: &'a str,
    within_bound: bool,
}

fn ratio_rows(report: &RatioReport) -> Vec<(RatioRow<'static>, String)> {
    report
        .entries
        .iter()
        .map(|e| {
            let ratio = e.ratio.map_or_else(|| "inf".to_string(), |r| format_rational(&r));
            let row = RatioRow {
                index: e.index,
                seed: e.seed,
                n: e.n,
                c: e.c,
                cost: format_rational(&e.cost),
                opt: format_rational(&e.opt),
                ratio: "",
                within_bound: e.within_bound,
            };
            (row, ratio)
        })
        .collect()
}

pub fn ratio_report_json(report: &RatioReport) -> Value {
    let entries: Vec<Value> = ratio_rows(report)
        .into_iter()
        .map(|(row, ratio)| {
            let mut v = serde_json::to_value(&row).expect("row serializes");
            v["ratio"] = json!(ratio);
            v
        })
        .collect();
    json!({
        "algorithm": report.algorithm.name(),
        "bound": report.bound,
        "count": report.entries.len(),
        "max_ratio": report.max_ratio.map_or_else(|| "inf".to_string(), |r| format_rational(&r)),
        "mean_ratio": report.mean_ratio,
        "violations": report.violations,
        "offender": report.offender.as_ref().map(instance_to_value),
        "entries": entries,
    })
}

pub fn ratio_report_csv(report: &RatioReport) -> Result<String, IoError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for (row, ratio) in ratio_rows(report) {
        w.serialize(RatioRow { ratio: &ratio, ..row })?;
    }
    let bytes = w.into_inner().map_err(|e| IoError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
