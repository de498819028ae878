//! Small named instances used throughout the tests, the acceptance suite and
//! the shipped fixture files.

use crate::instance::{validate, Instance, Kind, RawInstance, RawVertex, SupportPolicy};
use crate::weight::Rational;

/// A string with one color letter per vertex (`'.'` for uncolored) and
/// integer weights. Vertex ids are `v1..vn`.
pub fn string(colors: &str, weights: &[i64]) -> Instance {
    assert_eq!(colors.chars().count(), weights.len());
    let names: Vec<Option<String>> =
        colors.chars().map(|ch| if ch == '.' { None } else { Some(ch.to_string()) }).collect();
    let raw = RawInstance::string(names.iter().map(|c| c.as_deref()).zip(weights.iter().copied()));
    validate(&raw, SupportPolicy::AsIs).expect("fixture string is valid")
}

/// A tree from `(id, weight, color)` rows and id pairs.
pub fn tree(vertices: &[(&str, i64, Option<&str>)], edges: &[(&str, &str)]) -> Instance {
    let raw = RawInstance {
        kind: Some(Kind::Tree),
        vertices: vertices
            .iter()
            .map(|&(id, w, c)| RawVertex {
                id: id.to_string(),
                weight: Rational::from_integer(w as i128),
                color: c.map(str::to_string),
            })
            .collect(),
        edges: Some(edges.iter().map(|&(a, b)| (a.to_string(), b.to_string())).collect()),
    };
    validate(&raw, SupportPolicy::AsIs).expect("fixture tree is valid")
}

/// Weight-0 uncolored center with six unit leaves colored R, R, G, G, B, B.
/// Vertex 0 is the center; leaves are 1..=6.
pub fn six_leaf_star() -> Instance {
    tree(
        &[
            ("c", 0, None),
            ("l1", 1, Some("R")),
            ("l2", 1, Some("R")),
            ("l3", 1, Some("G")),
            ("l4", 1, Some("G")),
            ("l5", 1, Some("B")),
            ("l6", 1, Some("B")),
        ],
        &[("c", "l1"), ("c", "l2"), ("c", "l3"), ("c", "l4"), ("c", "l5"), ("c", "l6")],
    )
}

/// `r(X,1) - s(.,0) - a(.,0)` with `a`'s children `b1(Y,1)`, `b2(Y,1)`, `c(X,1)`.
///
/// The `Y` vertices are confined below the zero-weight junction `a`, which
/// also lies on the path between the two `X` vertices. Indices: r=0, s=1,
/// a=2, b1=3, b2=4, c=5; palette X=0, Y=1.
pub fn caterpillar() -> Instance {
    tree(
        &[
            ("r", 1, Some("X")),
            ("s", 0, None),
            ("a", 0, None),
            ("b1", 1, Some("Y")),
            ("b2", 1, Some("Y")),
            ("c", 1, Some("X")),
        ],
        &[("r", "s"), ("s", "a"), ("a", "b1"), ("a", "b2"), ("a", "c")],
    )
}

/// Like [`caterpillar`] but the subtree below `a` has two `Y` leaves of
/// weight 2 and `X` leaves of weights 2 and 1, so that painting the subtree
/// all `Y` costs 3, the cheapest bicoloring with `a` colored `X` costs 2 and
/// the unconstrained optimum costs 1.
/// Indices: r=0, s=1, a=2, b1=3, b2=4, c1=5, c2=6.
pub fn gadget_three_two_one() -> Instance {
    tree(
        &[
            ("r", 1, Some("X")),
            ("s", 0, None),
            ("a", 0, None),
            ("b1", 2, Some("Y")),
            ("b2", 2, Some("Y")),
            ("c1", 2, Some("X")),
            ("c2", 1, Some("X")),
        ],
        &[("r", "s"), ("s", "a"), ("a", "b1"), ("a", "b2"), ("a", "c1"), ("a", "c2")],
    )
}

/// A light center (weight 1, color O) joining four heavy leaves colored
/// T, R, T, R (weight 10 each). Both the T and R carriers run through the
/// center, so any convex recoloring overwrites a heavy leaf, while the
/// penalty bound only charges the center.
pub fn poor_bound_star() -> Instance {
    tree(
        &[
            ("o", 1, Some("O")),
            ("t1", 10, Some("T")),
            ("r1", 10, Some("R")),
            ("t2", 10, Some("T")),
            ("r2", 10, Some("R")),
        ],
        &[("o", "t1"), ("o", "r1"), ("o", "t2"), ("o", "r2")],
    )
}
