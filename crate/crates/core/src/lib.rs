//! Minimum convex recoloring of weighted colored strings and trees.
//!
//! A coloring of a tree is convex when every color class induces a single
//! connected subtree. Given a partially colored tree with nonnegative vertex
//! weights, the goal is to overwrite a minimum-weight set of vertices so the
//! result is convex. This crate provides:
//!
//! * the data model and convexity predicates ([`instance`], [`coloring`], [`convexity`]);
//! * per-color penalty lower bounds ([`penalty`]);
//! * a 2-approximation scan and a local-ratio 3-approximation for strings ([`string_approx`]);
//! * local-ratio 4- and 3-approximations for trees ([`tree_approx`]);
//! * an exhaustive exact oracle, seeded instance generators and ratio
//!   measurement ([`oracle`]);
//! * JSON/TSV instance files and result serialization ([`io`]).

pub mod coloring;
pub mod convexity;
pub mod error;
pub mod fixtures;
pub mod instance;
pub mod io;
pub mod oracle;
pub mod penalty;
pub mod solution;
pub mod string_approx;
pub mod tree_approx;
pub mod weight;

pub use coloring::{Coloring, Cover};
pub use error::{Error, Result};
pub use solution::{LocalRatioStep, Solution};
pub use instance::{validate, ColorId, Instance, InstanceError, Kind, RawInstance, RawVertex, Rooted, SupportPolicy, Vertex};
pub use weight::{Rational, Weight};
